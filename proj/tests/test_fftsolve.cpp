#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "localdpm/fftsolve.hpp"
#include "test_util.hpp"

using namespace localdpm;
using localdpm::testing::code_of;

namespace {

// Second-difference weights at offsets -r..r.
std::vector<double> weights(Order order) {
  if (order == Order::O2) return {1.0, -2.0, 1.0};
  return {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
}

// 1D matrix on nodes 1..n with a zero ring and odd reflection beyond it.
Eigen::MatrixXd dense_1d(Order order, int n) {
  const auto w = weights(order);
  const int r = stencil_radius(order);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int s = -r; s <= r; ++s) {
      const int k = i + s;
      const double c = w[s + r];
      if (k >= 1 && k <= n) K(i - 1, k - 1) += c;
      else if (k < 0) K(i - 1, -k - 1) -= c;
      else if (k > n + 1) K(i - 1, 2 * (n + 1) - k - 1) -= c;
    }
  }
  return K;
}

Eigen::MatrixXd dense_2d(Order order, int n, double h, double sigma) {
  const Eigen::MatrixXd K = dense_1d(order, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  // Flat index (iy-1) n + (ix-1): x is the fast index.
  Eigen::MatrixXd A(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      A.block(a * n, b * n, n, n) = I(a, b) * K + K(a, b) * I;
  A /= h * h;
  A -= sigma * Eigen::MatrixXd::Identity(n * n, n * n);
  return A;
}

GridFunction random_grid_function(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  GridFunction q(n);
  for (auto& v : q.values()) v = d(rng);
  return q;
}

using Case = std::tuple<int, Order, double>;
class AuxSolve : public ::testing::TestWithParam<Case> {};

}  // namespace

TEST(Spectrum, MatchDenseSpectrum) {
  for (Order order : {Order::O2, Order::O4}) {
    const int n = 23;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_1d(order, n));
    std::vector<double> mine;
    for (int j = 1; j <= n; ++j) mine.push_back(eigenvalue(order, j, n));
    std::sort(mine.begin(), mine.end());
    for (int j = 0; j < n; ++j) EXPECT_NEAR(mine[j], es.eigenvalues()(j), 1e-12);
  }
  EXPECT_EQ(code_of([] { eigenvalue(Order::O2, 0, 5); }), ErrorCode::InvalidParameter);
}

TEST(Spectrum, SineColumnsAreEigenvectors) {
  for (Order order : {Order::O2, Order::O4}) {
    const int n = 31;
    const Eigen::MatrixXd K = dense_1d(order, n);
    for (int j = 1; j <= n; ++j) {
      Eigen::VectorXd s(n);
      for (int k = 1; k <= n; ++k) s(k - 1) = std::sin(j * k * std::numbers::pi / (n + 1));
      EXPECT_LE((K * s - eigenvalue(order, j, n) * s).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SineTransform, InvolutionAndBackendsAgree) {
  for (int n : {1, 7, 64, 65, 200}) {
    std::mt19937 rng(n);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    const auto a = dst_direct(v);
    const auto b = dst_fast(v);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * n);
    // S S = (n+1)/2 I.
    const auto back = dst(dst(v));
    for (int i = 0; i < n; ++i) EXPECT_NEAR(back[i] * 2.0 / (n + 1), v[i], 1e-13 * n);
  }
}

TEST_P(AuxSolve, MatchesDenseDirectSolve) {
  const auto [n, order, sigma] = GetParam();
  const AuxGrid grid = build_grid(Bounds::square(1.0), n);
  const SpectralPlan plan(grid, order, sigma);
  const GridFunction q = random_grid_function(n, 5 + n);
  const GridFunction u = solve_aux(q, plan);
  const Eigen::VectorXd ref =
      dense_2d(order, n, grid.h(), sigma).partialPivLu().solve(
          Eigen::Map<const Eigen::VectorXd>(q.values().data(), n * n));
  double err = 0.0;
  for (int i = 0; i < n * n; ++i) err = std::max(err, std::abs(u[i] - ref(i)));
  EXPECT_LE(err, 1e-11);

  // The residual through the stencil application vanishes too.
  const GridFunction back = apply_Lh(u, plan);
  for (int i = 0; i < n * n; ++i) EXPECT_NEAR(back[i], q[i], 1e-9);
}

INSTANTIATE_TEST_SUITE_P(
    Sizes, AuxSolve,
    ::testing::Combine(::testing::Values(15, 31), ::testing::Values(Order::O2, Order::O4),
                       ::testing::Values(0.0, 1.0, 100.0)),
    [](const auto& info) {
      return "N" + std::to_string(std::get<0>(info.param)) + "_O" +
             std::to_string(static_cast<int>(std::get<1>(info.param))) + "_sigma" +
             std::to_string(static_cast<int>(std::get<2>(info.param)));
    });

TEST(AuxSolveExtended, AgreesWithDoublePath) {
  const int n = 40;
  const AuxGrid grid = build_grid(Bounds::square(1.0), n);
  const SpectralPlan plan(grid, Order::O4, 3.0);
  const GridFunction q = random_grid_function(n, 9);
  const GridFunction u = plan.solve(q);
  std::vector<long double> ext(q.values().begin(), q.values().end());
  plan.solve_inplace_extended(ext);
  for (int i = 0; i < n * n; ++i) EXPECT_NEAR(static_cast<double>(ext[i]), u[i], 1e-13);
  std::vector<long double> wrong(3);
  EXPECT_EQ(code_of([&] { plan.solve_inplace_extended(wrong); }), ErrorCode::InvalidParameter);
}

TEST(AuxSolve1D, MatchesDense) {
  for (Order order : {Order::O2, Order::O4}) {
    const int n = 33;
    const double h = 0.05, sigma = 2.0;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = std::cos(0.3 * i);
    const auto u = solve_aux_1d(q, order, h, sigma);
    Eigen::MatrixXd A = dense_1d(order, n) / (h * h) - sigma * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd ref = A.partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(q.data(), n));
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(u[i], ref(i), 1e-11);
      EXPECT_NEAR(apply_Lh_1d_at(u, order, h, sigma, i), q[i], 1e-8);
    }
  }
}

TEST(AuxSolveChecks, RejectsBadInput) {
  const AuxGrid grid = build_grid(Bounds::square(1.0), 8);
  EXPECT_EQ(code_of([&] { SpectralPlan(grid, Order::O2, -1.0); }), ErrorCode::InvalidParameter);
  const SpectralPlan plan(grid, Order::O2, 0.0);
  EXPECT_EQ(code_of([&] { plan.solve(GridFunction(7)); }), ErrorCode::InvalidParameter);
}

TEST(AuxSolveChecks, SineModeIsExact) {
  // A single product of sines is an eigenfunction of the discrete operator.
  const int n = 47;
  const AuxGrid grid = build_grid(Bounds::square(1.0), n);
  for (Order order : {Order::O2, Order::O4}) {
    const SpectralPlan plan(grid, order, 4.0);
    const int j = 3, k = 5;
    const double lam = (eigenvalue(order, j, n) + eigenvalue(order, k, n)) / (grid.h() * grid.h()) - 4.0;
    GridFunction q(n);
    for (int iy = 1; iy <= n; ++iy)
      for (int ix = 1; ix <= n; ++ix)
        q[grid.flat({ix, iy})] = std::sin(j * ix * std::numbers::pi / (n + 1)) *
                                 std::sin(k * iy * std::numbers::pi / (n + 1));
    const GridFunction u = plan.solve(q);
    for (int i = 0; i < n * n; ++i) EXPECT_NEAR(u[i] * lam, q[i], 1e-12);
  }
}

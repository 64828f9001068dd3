#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "localdpm/dpm.hpp"
#include "test_util.hpp"

using namespace localdpm;
using localdpm::testing::code_of;

namespace {

struct Pipeline {
  PointSets sets;
  std::vector<IntersectionPoint> pairs;
};

// Steps 1-3 of the solver for one of the reference shapes.
Pipeline build(const std::string& shape_key, int n, Order order) {
  const LevelSetShape shape = shape_from_key(shape_key, 10.0);
  const double half_width = shape_key == "multi" ? 1.15 : shape_key == "triangle" ? 1.1 : 1.2;
  const GuardMode guard = shape_key == "multi" || shape_key == "triangle" ? GuardMode::Tolerant
                                                                          : GuardMode::Strict;
  const AuxGrid grid = build_grid(Bounds::square(half_width), n);
  std::vector<UnresolvedEdge> unresolved;
  const auto raw = grid_line_intersections(shape, grid, guard, &unresolved);
  if (shape_key != "multi") unresolved.clear();
  Pipeline p;
  p.sets = classify_points(grid, shape, order, unresolved);
  p.pairs = pair_intersections(p.sets, raw);
  build_eta_omega(p.sets, p.pairs);
  return p;
}

GridFunction random_source(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  GridFunction q(n);
  for (auto& v : q.values()) v = d(rng);
  return q;
}

std::vector<double> trace(const GridFunction& w, const PointSets& s) {
  std::vector<double> v;
  for (int f : s.zeta) v.push_back(w[f]);
  return v;
}

using ShapeOrder = std::tuple<std::string, Order>;
class Shapes : public ::testing::TestWithParam<ShapeOrder> {};

std::string case_name(const ::testing::TestParamInfo<ShapeOrder>& info) {
  return std::get<0>(info.param) + "_O" + std::to_string(static_cast<int>(std::get<1>(info.param)));
}

}  // namespace

TEST_P(Shapes, BoundaryEquationsHoldForAuxiliarySolutions) {
  const auto [key, order] = GetParam();
  const Pipeline p = build(key, 64, order);
  const PointSets& s = p.sets;
  const SpectralPlan plan(s.grid, order, 0.0);

  // w solves the auxiliary problem with a random right-hand side F; the
  // interior data is f = F on M+.
  const GridFunction F = random_source(s.grid.n(), 17);
  const GridFunction w = plan.solve(F);
  const GridFunction Gf = particular_solution(F, s, plan);
  const PotentialOperator P = assemble_P(s, plan);
  const auto wz = trace(w, s);
  const Eigen::VectorXd Pw = P.matrix * Eigen::Map<const Eigen::VectorXd>(wz.data(), wz.size());
  double residual = 0.0;
  for (int r = 0; r < static_cast<int>(s.zeta_plus.size()); ++r) {
    const int f = s.zeta[s.zeta_plus[r]];
    residual = std::max(residual, std::abs(w[f] - Pw(r) - Gf[f]));
  }
  EXPECT_LE(residual, 1e-10);
}

TEST_P(Shapes, EtaAndOmegaColumnsVanish) {
  const auto [key, order] = GetParam();
  const Pipeline p = build(key, 64, order);
  const PointSets& s = p.sets;
  const SpectralPlan plan(s.grid, order, 1.0);
  const PotentialOperator P = assemble_P(s, plan, 1, true);
  ASSERT_TRUE(P.all_columns_computed);
  double worst = 0.0;
  for (int j = 0; j < static_cast<int>(s.zeta.size()); ++j)
    if (!s.has(s.zeta[j], kGamma)) worst = std::max(worst, P.matrix.col(j).cwiseAbs().maxCoeff());
  EXPECT_LE(worst, 1e-12);
}

TEST_P(Shapes, ExtrapolationRowsAreExactForPolynomials) {
  const auto [key, order] = GetParam();
  const Pipeline p = build(key, 64, order);
  const PointSets& s = p.sets;
  const auto rows = extrapolation_rows(s);
  ASSERT_EQ(rows.size(), s.eta.size());
  // Degree count-1 along any grid line or diagonal: linear for O2, cubic for O4.
  const auto poly = [&](Vec2 q) {
    return order == Order::O2 ? 0.3 + q.x - 2.0 * q.y
                              : 0.3 + q.x - 2.0 * q.y + q.x * q.x * q.y - 0.7 * q.y * q.y * q.y;
  };
  std::vector<double> v;
  for (int f : s.zeta) v.push_back(poly(s.grid.position(s.grid.node(f))));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_NEAR(rows[k].dot(v), 0.0, 1e-12) << "eta row " << k;
    // The eta node itself carries the unit coefficient.
    const int own = s.zeta_slot[s.eta[k]];
    bool found = false;
    for (std::size_t i = 0; i < rows[k].cols.size(); ++i)
      if (rows[k].cols[i] == own) found = rows[k].vals[i] == 1.0;
    EXPECT_TRUE(found);
  }
}

INSTANTIATE_TEST_SUITE_P(AllShapes, Shapes,
                         ::testing::Combine(::testing::Values("ellipse", "multi", "triangle"),
                                            ::testing::Values(Order::O2, Order::O4)),
                         case_name);

TEST(Potentials, LinearInTheDensity) {
  const Pipeline p = build("ellipse", 64, Order::O4);
  const SpectralPlan plan(p.sets.grid, Order::O4, 2.0);
  const std::size_t m = p.sets.zeta.size();
  std::vector<double> a(m), b(m), c(m);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = d(rng);
    b[i] = d(rng);
    c[i] = 2.0 * a[i] - 3.0 * b[i];
  }
  const GridFunction pa = potential_of_density(a, p.sets, plan);
  const GridFunction pb = potential_of_density(b, p.sets, plan);
  const GridFunction pc = potential_of_density(c, p.sets, plan);
  for (std::size_t i = 0; i < pa.size(); ++i)
    EXPECT_NEAR(pc[i], 2.0 * pa[i] - 3.0 * pb[i], 1e-11);
}

TEST(Potentials, ColumnsAreUnitDensityPotentialsAndThreadIndependent) {
  const Pipeline p = build("ellipse", 64, Order::O2);
  const PointSets& s = p.sets;
  const SpectralPlan plan(s.grid, Order::O2, 0.0);
  const PotentialOperator one = assemble_P(s, plan, 1);
  const PotentialOperator three = assemble_P(s, plan, 3);
  EXPECT_TRUE((one.matrix.array() == three.matrix.array()).all());
  for (int j : {0, static_cast<int>(s.eta.size()), static_cast<int>(s.zeta.size()) / 2}) {
    std::vector<double> e(s.zeta.size(), 0.0);
    e[j] = 1.0;
    const GridFunction pot = potential_of_density(e, s, plan);
    const bool gamma = s.has(s.zeta[j], kGamma);
    for (int r = 0; r < static_cast<int>(s.zeta_plus.size()); ++r)
      EXPECT_NEAR(one.matrix(r, j), gamma ? pot[s.zeta[s.zeta_plus[r]]] : 0.0, 1e-14);
  }
}

TEST(Potentials, ExtendedPathsAgreeWithDouble) {
  const Pipeline p = build("ellipse", 64, Order::O4);
  const SpectralPlan plan(p.sets.grid, Order::O4, 0.0);
  std::vector<double> v(p.sets.zeta.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * static_cast<double>(i));
  const GridFunction f = random_source(p.sets.grid.n(), 4);
  const GridFunction Gf = particular_solution(f, p.sets, plan);
  const ExtendedValues Gf_ext = particular_solution_extended(f, p.sets, plan);
  const GridFunction u = reconstruct(v, Gf, p.sets, plan);
  const GridFunction u_ext = reconstruct_extended(v, Gf_ext, p.sets, plan);
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(Gf_ext[i]), Gf[i], 1e-13);
    EXPECT_NEAR(u_ext[i], u[i], 1e-11);
  }
  EXPECT_EQ(code_of([&] { potential_of_density(std::vector<double>(3), p.sets, plan); }),
            ErrorCode::InvalidParameter);
}

TEST(BoundarySystemTest, LayoutAndSizeCheck) {
  const Pipeline p = build("ellipse", 64, Order::O2);
  const PointSets& s = p.sets;
  const SpectralPlan plan(s.grid, Order::O2, 0.0);
  const PotentialOperator P = assemble_P(s, plan);
  const GridFunction Gf = particular_solution(random_source(s.grid.n(), 2), s, plan);
  const auto extrap = extrapolation_rows(s);
  std::vector<SparseRow> bc(s.gamma_minus_1.size());
  for (std::size_t k = 0; k < bc.size(); ++k) {
    bc[k].cols = {s.zeta_slot[s.gamma_minus_1[k]]};
    bc[k].vals = {1.0};
    bc[k].rhs = 0.5;
  }
  const BoundarySystem sys = assemble_boundary_system(s, P, Gf, bc, {}, extrap);
  const int np = static_cast<int>(s.zeta_plus.size());
  ASSERT_EQ(sys.matrix.rows(), static_cast<Eigen::Index>(s.zeta.size()));
  EXPECT_EQ(sys.projection_rows, np);
  for (int r = 0; r < np; ++r) {
    EXPECT_DOUBLE_EQ(sys.rhs(r), Gf[s.zeta[s.zeta_plus[r]]]);
    EXPECT_DOUBLE_EQ(sys.matrix(r, s.zeta_plus[r]), 1.0 - P.matrix(r, s.zeta_plus[r]));
  }
  EXPECT_DOUBLE_EQ(sys.rhs(np), 0.5);

  bc.pop_back();
  EXPECT_EQ(code_of([&] { assemble_boundary_system(s, P, Gf, bc, {}, extrap); }),
            ErrorCode::AssemblyInvariant);
}

TEST(DenseSolve, SolutionConditionAndSingularity) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(-1, 1);
  BoundarySystem sys;
  sys.matrix = Eigen::MatrixXd::NullaryExpr(40, 40, [&](Eigen::Index, Eigen::Index) { return d(rng); });
  sys.matrix.diagonal().array() += 5.0;
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(40, -1.0, 2.0);
  sys.rhs = sys.matrix * x;
  const DensitySolution out = solve_density(sys);
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(out.density[i], x(i), 1e-13);
  EXPECT_LT(out.residual, 1e-14);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix);
  const auto sv = svd.singularValues();
  EXPECT_NEAR(out.cond2, sv(0) / sv(39), 1e-9 * out.cond2);
  const Eigen::MatrixXd inv = sys.matrix.inverse();
  const double exact_inf = sys.matrix.cwiseAbs().rowwise().sum().maxCoeff() *
                           inv.cwiseAbs().rowwise().sum().maxCoeff();
  EXPECT_LE(out.cond_inf, exact_inf * (1 + 1e-10));
  EXPECT_GE(out.cond_inf, 0.3 * exact_inf);

  DensityOptions skip;
  skip.condition_2norm = false;
  skip.condition_inf = false;
  const DensitySolution bare = solve_density(sys, skip);
  EXPECT_TRUE(std::isnan(bare.cond2));
  EXPECT_TRUE(std::isnan(bare.cond_inf));

  sys.matrix.row(7) = sys.matrix.row(3);
  EXPECT_EQ(code_of([&] { solve_density(sys); }), ErrorCode::SingularSystem);
}

TEST(DenseSolve, HagerEstimateMatchesExactNorm) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(25, 25, [&](Eigen::Index, Eigen::Index) { return d(rng); });
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd inv = A.inverse();
    const double norm1 = inv.cwiseAbs().colwise().sum().maxCoeff();
    const double norm_inf = inv.cwiseAbs().rowwise().sum().maxCoeff();
    const double e1 = inverse_norm1_estimate(lu, false);
    const double einf = inverse_norm1_estimate(lu, true);
    EXPECT_LE(e1, norm1 * (1 + 1e-10));
    EXPECT_GE(e1, 0.3 * norm1);
    EXPECT_LE(einf, norm_inf * (1 + 1e-10));
    EXPECT_GE(einf, 0.3 * norm_inf);
  }
}

TEST(DenseSolve, RefinementUsesTheResidualCallback) {
  // A perturbed copy stands in for the stored matrix; the callback knows the
  // exact one, so refinement converges to the exact solution.
  const int n = 30;
  Eigen::MatrixXd exact = Eigen::MatrixXd::Identity(n, n) * 4.0;
  for (int i = 0; i + 1 < n; ++i) exact(i, i + 1) = exact(i + 1, i) = -1.0;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  BoundarySystem sys;
  sys.matrix = exact;
  sys.matrix(0, 0) += 1e-6;
  sys.rhs = exact * x;
  int calls = 0;
  DensityOptions options;
  options.residual = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    ++calls;
    return sys.rhs - exact * u;
  };
  options.refinement_steps = 3;
  const DensitySolution out = solve_density(sys, options);
  EXPECT_EQ(calls, 3);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(out.density[i], 1.0, 1e-15 * 10);

  options.refinement_steps = 0;
  const DensitySolution plain = solve_density(sys, options);
  EXPECT_GT(std::abs(plain.density[0] - 1.0), 1e-8);
}

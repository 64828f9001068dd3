#include "localdpm/solve1d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "localdpm/basis.hpp"
#include "localdpm/error.hpp"
#include "localdpm/fftsolve.hpp"
#include "localdpm/grid.hpp"

namespace localdpm {

namespace {

constexpr double kW2[3] = {1.0, -2.0, 1.0};
constexpr double kW4[5] = {-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};

}  // namespace

Solution1D solve_1d(const Problem1D& pb) {
  require(pb.b > pb.a && pb.margin > 0.0, ErrorCode::InvalidParameter,
          "1D problem needs a < b and a positive margin");
  require(pb.f && pb.exact, ErrorCode::InvalidParameter, "1D problem needs f and exact");
  require(pb.sigma >= 0.0, ErrorCode::InvalidParameter, "sigma must be non-negative");
  const int n = pb.n;
  require(n >= 8, ErrorCode::InvalidParameter, "1D problem needs n >= 8");
  const double left = pb.a - pb.margin;
  const double h = (pb.b - pb.a + 2.0 * pb.margin) / (n + 1);
  const int r = stencil_radius(pb.order);
  const int degree = basis_degree(pb.order);
  auto x = [&](int i) { return left + (i + 1) * h; };

  std::vector<bool> inside(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) inside[i] = x(i) > pb.a && x(i) < pb.b;
  const PointSets1D sets = classify_points_1d(inside, pb.order);
  // gamma- reaches r nodes past M+ and its stencil r more.
  for (int i : sets.m_plus) {
    if (std::min(i, n - 1 - i) < 2 * r) {
      fail(ErrorCode::DomainMargin, "interval too close to the auxiliary boundary");
    }
  }

  const int m = static_cast<int>(sets.gamma.size());
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int k = 0; k < m; ++k) slot[sets.gamma[k]] = k;

  // Potentials of unit densities on gamma, traced on gamma+.
  const double* w = pb.order == Order::O2 ? kW2 : kW4;
  auto potential = [&](const std::vector<double>& dens) {
    std::vector<double> q(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < m; ++k) {
      if (dens[k] == 0.0) continue;
      const int j = sets.gamma[k];
      for (int s = -r; s <= r; ++s) {
        const int i = j + s;
        require(i >= 0 && i < n, ErrorCode::StencilRange, "1D density stencil leaves the grid");
        if (inside[i]) continue;
        double c = w[s + r] / (h * h);
        if (s == 0) c -= pb.sigma;
        q[i] += c * dens[k];
      }
    }
    return solve_aux_1d(q, pb.order, h, pb.sigma);
  };

  std::vector<double> fq(static_cast<std::size_t>(n), 0.0);
  for (int i : sets.m_plus) fq[i] = pb.f(x(i));
  const std::vector<double> Gf = solve_aux_1d(fq, pb.order, h, pb.sigma);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  std::vector<int> plus_rows;
  for (int k = 0; k < m; ++k)
    if (inside[sets.gamma[k]]) plus_rows.push_back(k);
  for (int k = 0; k < m; ++k) {
    std::vector<double> e(static_cast<std::size_t>(m), 0.0);
    e[k] = 1.0;
    const std::vector<double> col = potential(e);
    for (std::size_t r2 = 0; r2 < plus_rows.size(); ++r2)
      A(static_cast<Eigen::Index>(r2), k) = -col[sets.gamma[plus_rows[r2]]];
  }
  int row = 0;
  for (int k : plus_rows) {
    A(row, k) += 1.0;
    rhs(row) = Gf[sets.gamma[k]];
    ++row;
  }

  // Collocation at the two end points: the cell (x_k, x_{k+1}] holding the point.
  auto collocate = [&](double p, bool compat) {
    const int k = static_cast<int>(std::ceil((p - left) / h)) - 2;
    const int lo = degree == 1 ? k : k - 1;
    const int hi = degree == 1 ? k + 1 : k + 2;
    require(row < m, ErrorCode::AssemblyInvariant, "too many 1D boundary rows");
    for (int i = lo; i <= hi; ++i) {
      if (i < 0 || i >= n || slot[i] < 0) {
        fail(ErrorCode::Completeness, "basis node covering a boundary point is not in gamma");
      }
      const double xi = p - x(i);
      A(row, slot[i]) = compat ? d2phi(degree, xi, h) - pb.sigma * phi(degree, xi, h)
                               : phi(degree, xi, h);
    }
    rhs(row) = compat ? pb.f(p) : pb.exact(p);
    ++row;
  };
  collocate(pb.a, false);
  collocate(pb.b, false);
  if (pb.order == Order::O4) {
    collocate(pb.a, true);
    collocate(pb.b, true);
  }
  require(row == m, ErrorCode::AssemblyInvariant, "1D boundary system is not square");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd u = lu.solve(rhs);

  Solution1D out;
  out.h = h;
  for (int k = 0; k < m; ++k) {
    const double xk = x(sets.gamma[k]);
    out.gamma_x.push_back(xk);
    out.density.push_back(u(k));
    out.density_error = std::max(out.density_error, std::abs(u(k) - pb.exact(xk)));
  }
  const std::vector<double> pu = potential(out.density);
  for (int i : sets.m_plus)
    out.solution_error = std::max(out.solution_error, std::abs(pu[i] + Gf[i] - pb.exact(x(i))));
  return out;
}

}  // namespace localdpm

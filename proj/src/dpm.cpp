#include "localdpm/dpm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "localdpm/error.hpp"

namespace localdpm {

GridFunction particular_solution(const GridFunction& f, const PointSets& sets,
                                 const SpectralPlan& plan) {
  GridFunction q(plan.n());
  for (int i = 0; i < static_cast<int>(q.size()); ++i)
    if (sets.in_m_plus(i)) q[i] = f[i];
  return plan.solve(q);
}

namespace {

constexpr double kW2[3] = {1.0, -2.0, 1.0};
constexpr double kW4[5] = {-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};

// Adds value * (L_h e_p) restricted to interior M- nodes into q.
template <class T>
void scatter_source(std::span<T> q, const PointSets& sets, const SpectralPlan& plan, Node p,
                    T value) {
  const AuxGrid& grid = sets.grid;
  const int r = stencil_radius(plan.order());
  const double* w = plan.order() == Order::O2 ? kW2 : kW4;
  const T h = plan.h();
  const T inv_h2 = T(1) / (h * h);
  auto add = [&](Node m, T coef) {
    if (!grid.is_interior(m)) {
      // The ring carries no equation; anything beyond it would need ghosts.
      require(m.ix >= 0 && m.iy >= 0 && m.ix <= grid.n() + 1 && m.iy <= grid.n() + 1,
              ErrorCode::StencilRange, "density stencil reaches past the auxiliary boundary");
      return;
    }
    const int f = grid.flat(m);
    if (!sets.in_m_plus(f)) q[f] += coef * value;
  };
  // Row m of L_h has weight w[s] at m + s e_x, so column p touches m = p - s e_x.
  // The O4 weights are exact in T only as ratios, so rebuild them from integers.
  auto weight = [&](int s) -> T {
    if (plan.order() == Order::O2) return T(w[r + s]);
    static constexpr int num[3] = {-30, 16, -1};
    return T(num[s < 0 ? -s : s]) / T(12);
  };
  add(p, T(2) * weight(0) * inv_h2 - T(plan.sigma()));
  for (int s = 1; s <= r; ++s) {
    const T c = weight(s) * inv_h2;
    add({p.ix - s, p.iy}, c);
    add({p.ix + s, p.iy}, c);
    add({p.ix, p.iy - s}, c);
    add({p.ix, p.iy + s}, c);
  }
}

}  // namespace

GridFunction potential_source(std::span<const double> v, const PointSets& sets,
                              const SpectralPlan& plan) {
  require(v.size() == sets.zeta.size(), ErrorCode::InvalidParameter,
          "density length does not match zeta");
  GridFunction q(plan.n());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    scatter_source(q.values(), sets, plan, sets.grid.node(sets.zeta[i]), v[i]);
  }
  return q;
}

GridFunction potential_of_density(std::span<const double> v, const PointSets& sets,
                                  const SpectralPlan& plan) {
  return plan.solve(potential_source(v, sets, plan));
}

ExtendedValues particular_solution_extended(const GridFunction& f, const PointSets& sets,
                                           const SpectralPlan& plan) {
  ExtendedValues q(f.size(), 0.0L);
  for (int i = 0; i < static_cast<int>(q.size()); ++i)
    if (sets.in_m_plus(i)) q[i] = f[i];
  plan.solve_inplace_extended(q);
  return q;
}

ExtendedValues potential_of_density_extended(std::span<const double> v, const PointSets& sets,
                                             const SpectralPlan& plan) {
  require(v.size() == sets.zeta.size(), ErrorCode::InvalidParameter,
          "density length does not match zeta");
  ExtendedValues q(static_cast<std::size_t>(plan.n()) * plan.n(), 0.0L);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    scatter_source(std::span<long double>(q), sets, plan, sets.grid.node(sets.zeta[i]),
                   static_cast<long double>(v[i]));
  }
  plan.solve_inplace_extended(q);
  return q;
}

PotentialOperator assemble_P(const PointSets& sets, const SpectralPlan& plan, int threads,
                             bool all_columns) {
  const int rows = static_cast<int>(sets.zeta_plus.size());
  const int cols = static_cast<int>(sets.zeta.size());
  PotentialOperator P;
  P.matrix = Eigen::MatrixXd::Zero(rows, cols);
  P.all_columns_computed = all_columns;

  std::vector<int> todo;
  for (int j = 0; j < cols; ++j)
    if (all_columns || sets.has(sets.zeta[j], kGamma)) todo.push_back(j);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      while (true) {
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) break;
        const int j = todo[k];
        GridFunction q(plan.n());
        scatter_source(q.values(), sets, plan, sets.grid.node(sets.zeta[j]), 1.0);
        plan.solve_inplace(q.values());
        double* col = P.matrix.col(j).data();
        for (int r = 0; r < rows; ++r) col[r] = q[sets.zeta[sets.zeta_plus[r]]];
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = todo.size();
    }
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(todo.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return P;
}

namespace {

struct Direction {
  int dx, dy;
};
// Axis directions first, then diagonals; within a line, + before -.
constexpr Direction kDirections[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                      {1, 1},  {-1, -1}, {1, -1}, {-1, 1}};

struct DirectionalRow {
  bool usable = false;  // every donor in zeta
  int eta_donors = 0;
  int plus_donors = 0;
  std::vector<int> donors;  // zeta positions, nearest first
};

DirectionalRow inspect(const PointSets& sets, Node p, Direction d, int count) {
  const AuxGrid& grid = sets.grid;
  DirectionalRow row;
  for (int k = 1; k <= count; ++k) {
    const Node q{p.ix + k * d.dx, p.iy + k * d.dy};
    if (!grid.is_interior(q)) return row;
    const int f = grid.flat(q);
    const int slot = sets.zeta_slot[f];
    if (slot < 0) return row;
    if (sets.has(f, kEta)) ++row.eta_donors;
    if (sets.in_m_plus(f)) ++row.plus_donors;
    row.donors.push_back(slot);
  }
  row.usable = true;
  return row;
}

// Fewer eta donors, then more M+ donors; ties keep `a`.
bool preferred(const DirectionalRow& a, const DirectionalRow& b) {
  if (!a.usable) return false;
  if (!b.usable) return true;
  if (a.eta_donors != b.eta_donors) return a.eta_donors < b.eta_donors;
  return a.plus_donors >= b.plus_donors;
}

const DirectionalRow* pick(const DirectionalRow& plus, const DirectionalRow& minus) {
  if (!plus.usable && !minus.usable) return nullptr;
  return preferred(plus, minus) ? &plus : &minus;
}

}  // namespace

std::vector<SparseRow> extrapolation_rows(const PointSets& sets) {
  const AuxGrid& grid = sets.grid;
  const bool o2 = sets.order == Order::O2;
  const int count = o2 ? 2 : 4;
  static constexpr double kO2[2] = {2.0, -1.0};
  static constexpr double kO4[4] = {4.0, -6.0, 4.0, -1.0};
  const double* w = o2 ? kO2 : kO4;

  std::vector<SparseRow> rows;
  rows.reserve(sets.eta.size());
  for (int f : sets.eta) {
    const Node p = grid.node(f);
    DirectionalRow dir[8];
    for (int k = 0; k < 8; ++k) dir[k] = inspect(sets, p, kDirections[k], count);
    // Best direction on each of the four lines through p.
    const DirectionalRow* line[4];
    for (int k = 0; k < 4; ++k) line[k] = pick(dir[2 * k], dir[2 * k + 1]);
    auto is_explicit = [](const DirectionalRow* d) { return d != nullptr && d->eta_donors == 0; };

    std::vector<const DirectionalRow*> chosen;
    for (int k = 0; k < 2; ++k)
      if (is_explicit(line[k])) chosen.push_back(line[k]);
    if (chosen.empty()) {
      for (int k = 2; k < 4; ++k)
        if (is_explicit(line[k])) chosen.push_back(line[k]);
    }
    if (chosen.empty()) {
      // Implicit extrapolation: donors may include other eta nodes.
      const DirectionalRow* best = nullptr;
      for (const DirectionalRow* d : line)
        if (d != nullptr && (best == nullptr || !preferred(*best, *d))) best = d;
      if (best == nullptr) {
        fail(ErrorCode::ExtrapolationStencil,
             "no grid line through eta node (" + std::to_string(p.ix) + "," +
                 std::to_string(p.iy) + ") carries enough zeta donors");
      }
      chosen.push_back(best);
    }

    std::map<int, double> coef;
    coef[sets.zeta_slot[f]] += 1.0;
    const double share = 1.0 / static_cast<double>(chosen.size());
    for (const DirectionalRow* d : chosen)
      for (int k = 0; k < count; ++k) coef[d->donors[k]] -= share * w[k];
    SparseRow row;
    for (const auto& [c, v] : coef) {
      row.cols.push_back(c);
      row.vals.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

BoundarySystem assemble_boundary_system(const PointSets& sets, const PotentialOperator& P,
                                        const GridFunction& Gf,
                                        std::span<const SparseRow> bc_rows,
                                        std::span<const SparseRow> compat_rows,
                                        std::span<const SparseRow> extrap_rows) {
  const int size = static_cast<int>(sets.zeta.size());
  const int np = static_cast<int>(sets.zeta_plus.size());
  const int total = np + static_cast<int>(bc_rows.size() + compat_rows.size() + extrap_rows.size());
  if (total != size || P.matrix.rows() != np || P.matrix.cols() != size) {
    fail(ErrorCode::AssemblyInvariant,
         "boundary system has " + std::to_string(total) + " rows for " + std::to_string(size) +
             " unknowns");
  }
  BoundarySystem sys;
  sys.matrix.resize(size, size);
  sys.rhs.resize(size);
  sys.matrix.topRows(np) = -P.matrix;
  for (int r = 0; r < np; ++r) {
    const int j = sets.zeta_plus[r];
    sys.matrix(r, j) += 1.0;
    sys.rhs(r) = Gf[sets.zeta[j]];
  }
  int r = np;
  auto put = [&](std::span<const SparseRow> block) {
    for (const SparseRow& row : block) {
      sys.matrix.row(r).setZero();
      for (std::size_t k = 0; k < row.cols.size(); ++k) sys.matrix(r, row.cols[k]) += row.vals[k];
      sys.rhs(r) = row.rhs;
      ++r;
    }
  };
  put(bc_rows);
  put(compat_rows);
  put(extrap_rows);
  sys.projection_rows = np;
  sys.bc_rows = static_cast<int>(bc_rows.size());
  sys.compat_rows = static_cast<int>(compat_rows.size());
  sys.extrapolation_rows = static_cast<int>(extrap_rows.size());
  return sys;
}

double inverse_norm1_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, bool transposed) {
  const Eigen::Index n = lu.matrixLU().rows();
  // B = A^-1 (or A^-T); Hager's iteration needs products with B and B^T.
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return transposed ? Eigen::VectorXd(lu.transpose().solve(v)) : Eigen::VectorXd(lu.solve(v));
  };
  auto apply_t = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return transposed ? Eigen::VectorXd(lu.solve(v)) : Eigen::VectorXd(lu.transpose().solve(v));
  };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  for (int it = 0; it < 5; ++it) {
    const Eigen::VectorXd y = apply(x);
    estimate = y.lpNorm<1>();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = y(i) >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd z = apply_t(s);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x(j) = 1.0;
  }
  return estimate;
}

DensitySolution solve_density(const BoundarySystem& system, const DensityOptions& options) {
  const Eigen::MatrixXd& A = system.matrix;
  require(A.rows() == A.cols() && A.rows() == system.rhs.size(), ErrorCode::AssemblyInvariant,
          "boundary system is not square");
  const double norm_inf = A.rows() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double min_pivot =
      A.rows() == 0 ? 0.0 : lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= 1e-14 * norm_inf) || !std::isfinite(min_pivot)) {
    fail(ErrorCode::SingularSystem, "boundary system is numerically singular (pivot " +
                                        std::to_string(min_pivot) + ")");
  }
  DensitySolution out;
  Eigen::VectorXd u = lu.solve(system.rhs);
  if (options.residual) {
    for (int step = 0; step < options.refinement_steps; ++step) {
      const Eigen::VectorXd r = options.residual(u);
      require(r.size() == u.size(), ErrorCode::AssemblyInvariant,
              "refinement residual has the wrong length");
      u += lu.solve(r);
    }
  }
  out.density.assign(u.data(), u.data() + u.size());
  const double bnorm = system.rhs.size() ? system.rhs.cwiseAbs().maxCoeff() : 0.0;
  const double rnorm = system.rhs.size() ? (A * u - system.rhs).cwiseAbs().maxCoeff() : 0.0;
  out.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.cond2 = nan;
  out.cond_inf = nan;
  if (options.condition_2norm && A.rows() <= options.svd_limit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    out.cond2 = s(0) / s(s.size() - 1);
  }
  if (options.condition_inf) {
    // ||A^-1||_inf = ||A^-T||_1.
    out.cond_inf = norm_inf * inverse_norm1_estimate(lu, true);
  }
  return out;
}

ResidualFunction extended_residual(const BoundarySystem& system, const PointSets& sets,
                                   const SpectralPlan& plan, const ExtendedValues& Gf) {
  return [&system, &sets, &plan, &Gf](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd& A = system.matrix;
    const int np = system.projection_rows;
    Eigen::VectorXd r(A.rows());
    // Projection rows from the potential itself rather than the stored P.
    const ExtendedValues pot =
        potential_of_density_extended(std::span<const double>(x.data(), x.size()), sets, plan);
    for (int i = 0; i < np; ++i) {
      const int j = sets.zeta_plus[i];
      const int f = sets.zeta[j];
      r(i) = static_cast<double>(Gf[f] - (static_cast<long double>(x(j)) - pot[f]));
    }
    for (Eigen::Index i = np; i < A.rows(); ++i) {
      long double acc = system.rhs(i);
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (A(i, j) != 0.0) acc -= static_cast<long double>(A(i, j)) * x(j);
      r(i) = static_cast<double>(acc);
    }
    return r;
  };
}

GridFunction reconstruct_extended(std::span<const double> density, const ExtendedValues& Gf,
                                  const PointSets& sets, const SpectralPlan& plan) {
  require(Gf.size() == static_cast<std::size_t>(plan.n()) * plan.n(),
          ErrorCode::InvalidParameter, "particular solution size does not match the plan");
  const ExtendedValues pot = potential_of_density_extended(density, sets, plan);
  GridFunction u(plan.n());
  for (int i = 0; i < static_cast<int>(u.size()); ++i)
    u[i] = static_cast<double>(pot[i] + Gf[i]);
  return u;
}

GridFunction reconstruct(std::span<const double> density, const GridFunction& Gf,
                         const PointSets& sets, const SpectralPlan& plan) {
  GridFunction u = potential_of_density(density, sets, plan);
  for (int i = 0; i < static_cast<int>(u.size()); ++i) u[i] += Gf[i];
  return u;
}

}  // namespace localdpm

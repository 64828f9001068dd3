#pragma once

#include <memory>
#include <span>
#include <vector>

#include "localdpm/aux_grid.hpp"
#include "localdpm/grid_function.hpp"
#include "localdpm/order.hpp"

namespace localdpm {

/// Eigenvalue j (1..n) of the 1D second-difference matrix, in units of 1/h^2.
double eigenvalue(Order order, int j, int n);

/// S v with S_jk = sin(j k pi / (n+1)).
std::vector<double> dst_direct(std::span<const double> v);
/// Same transform through FFTW's odd-extension real transform.
std::vector<double> dst_fast(std::span<const double> v);
/// dst_direct for n <= 64, dst_fast above.
std::vector<double> dst(std::span<const double> v);

/// Fast solver for (K/h^2 - sigma I) u = q on the interior of the auxiliary
/// square, homogeneous Dirichlet on the ring, antisymmetric ghosts for O4.
/// Immutable after construction; solve() is reentrant.
class SpectralPlan {
 public:
  SpectralPlan(const AuxGrid& grid, Order order, double sigma);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  int n() const { return n_; }
  double h() const { return h_; }
  double sigma() const { return sigma_; }
  Order order() const { return order_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }

  GridFunction solve(const GridFunction& q) const;
  /// In-place variant on an n*n array (any alignment).
  void solve_inplace(std::span<double> data) const;
  /// Same solve in long double, for residuals that must resolve more than
  /// double-precision cancellation. Planned on first use.
  void solve_inplace_extended(std::span<long double> data) const;

 private:
  struct Fft;
  int n_;
  double h_;
  double sigma_;
  Order order_;
  std::vector<double> lambda_;
  std::vector<double> scale_;  // 1 / (4 (n+1)^2 denominator_jk), row-major
  std::unique_ptr<Fft> fft_;
};

GridFunction solve_aux(const GridFunction& q, const SpectralPlan& plan);

/// (Delta_h - sigma) u at one interior node, with antisymmetric reflection
/// for stencil points beyond the ring. Stencil-range error if the stencil
/// leaves the reflected range.
double apply_Lh_at(const GridFunction& u, const SpectralPlan& plan, Node p);
std::vector<double> apply_Lh(const GridFunction& u, const SpectralPlan& plan,
                             std::span<const int> at);
/// At every interior node.
GridFunction apply_Lh(const GridFunction& u, const SpectralPlan& plan);

/// 1D analogue on n interior nodes: (K/h^2 - sigma) u = q.
std::vector<double> solve_aux_1d(std::span<const double> q, Order order, double h,
                                 double sigma);
double apply_Lh_1d_at(std::span<const double> u, Order order, double h, double sigma, int i);

}  // namespace localdpm

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "localdpm/bc.hpp"
#include "localdpm/fftsolve.hpp"
#include "localdpm/grid.hpp"
#include "localdpm/grid_function.hpp"

namespace localdpm {

/// Values indexed by zeta position (eta, gamma, omega blocks).
using DensityVector = std::vector<double>;

/// G_h X_{M+} f.
GridFunction particular_solution(const GridFunction& f, const PointSets& sets,
                                 const SpectralPlan& plan);

/// Right-hand side X_{M-} L_h vbar of the potential, vbar the zero extension
/// of the density.
GridFunction potential_source(std::span<const double> v, const PointSets& sets,
                              const SpectralPlan& plan);

/// G_h X_{M-} L_h vbar on the whole interior.
GridFunction potential_of_density(std::span<const double> v, const PointSets& sets,
                                  const SpectralPlan& plan);

/// Long double grid values, flat interior layout.
using ExtendedValues = std::vector<long double>;

/// Long double versions of the two solves above, used for refinement.
ExtendedValues particular_solution_extended(const GridFunction& f, const PointSets& sets,
                                           const SpectralPlan& plan);
ExtendedValues potential_of_density_extended(std::span<const double> v, const PointSets& sets,
                                             const SpectralPlan& plan);

/// Rows follow sets.zeta_plus, columns follow sets.zeta.
struct PotentialOperator {
  Eigen::MatrixXd matrix;
  bool all_columns_computed = false;
};

/// Column j is the zeta+ trace of the potential of the unit density e_j.
/// Only gamma columns are solved unless `all_columns`; eta and omega columns
/// are then left at zero. Columns are distributed over `threads` workers and
/// written to disjoint storage, so the result does not depend on `threads`.
PotentialOperator assemble_P(const PointSets& sets, const SpectralPlan& plan, int threads = 1,
                             bool all_columns = false);

/// One row per eta node, in eta order: u_eta - sum w_k u_k = 0 along a grid
/// line through eta, averaged over x and y when both axes give explicit rows.
/// Diagonal lines are used only when no axis line has enough zeta donors
/// free of other eta nodes (acute corners).
std::vector<SparseRow> extrapolation_rows(const PointSets& sets);

struct BoundarySystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  int projection_rows = 0;
  int bc_rows = 0;
  int compat_rows = 0;
  int extrapolation_rows = 0;
};

/// Rows: [I - P on zeta+ | bc rows | compatibility rows | extrapolation rows].
BoundarySystem assemble_boundary_system(const PointSets& sets, const PotentialOperator& P,
                                        const GridFunction& Gf,
                                        std::span<const SparseRow> bc_rows,
                                        std::span<const SparseRow> compat_rows,
                                        std::span<const SparseRow> extrap_rows);

/// x -> b - A x, possibly more accurate than the stored A allows.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DensityOptions {
  bool condition_2norm = true;
  bool condition_inf = true;
  /// Full SVD only up to this size; above it cond2 is reported as NaN.
  int svd_limit = 6000;
  /// When set, the LU solution gets `refinement_steps` correction steps
  /// x += A^-1 residual(x).
  ResidualFunction residual;
  int refinement_steps = 1;
};

struct DensitySolution {
  DensityVector density;
  double cond2 = 0.0;     // sigma_max / sigma_min, NaN when skipped
  double cond_inf = 0.0;  // ||A||_inf * estimate of ||A^-1||_inf, NaN when skipped
  double residual = 0.0;  // ||A u - b||_inf / ||b||_inf (0 when b = 0)
};

/// Partial-pivot LU. Singular-system error when a pivot falls below
/// 1e-14 * ||A||_inf.
DensitySolution solve_density(const BoundarySystem& system, const DensityOptions& options = {});

/// Hager's lower estimate of ||A^-1||_1 (or ||A^-T||_1 = ||A^-1||_inf when
/// `transposed`) from an LU factorization of A.
double inverse_norm1_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                              bool transposed = false);

/// Residual whose projection rows use the long double potential of x
/// instead of P, and whose other rows are summed in long double. Keeps
/// references to its arguments.
ResidualFunction extended_residual(const BoundarySystem& system, const PointSets& sets,
                                   const SpectralPlan& plan, const ExtendedValues& Gf);

/// reconstruct() with the long double potential and particular solution.
GridFunction reconstruct_extended(std::span<const double> density, const ExtendedValues& Gf,
                                  const PointSets& sets, const SpectralPlan& plan);

/// u = P u_zeta + G_h f, meaningful on N+ (see PointSets flags).
GridFunction reconstruct(std::span<const double> density, const GridFunction& Gf,
                         const PointSets& sets, const SpectralPlan& plan);

}  // namespace localdpm

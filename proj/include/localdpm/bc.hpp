#pragma once

#include <span>
#include <vector>

#include "localdpm/geometry.hpp"
#include "localdpm/grid.hpp"

namespace localdpm {

enum class BcKind { Dirichlet, Robin };

/// Dirichlet: u = g. Robin: du/dn + alpha_coeff * u = g.
struct BoundaryCondition {
  BcKind kind = BcKind::Dirichlet;
  double alpha_coeff = 1.0;
  ScalarField g;
};

/// One equation over zeta positions.
struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;
  double rhs = 0.0;

  double dot(std::span<const double> density) const;
};

/// Moves the point 1e-3*h along the boundary tangent into the open support
/// cell and re-roots it onto Gamma with one Newton step. The step doubles (up
/// to 3 times) while the point sits within 1e-9*h of a grid line and is halved
/// when it leaves the cell. Breakpoint error if no admissible point is found.
Vec2 nudge_into_cell(const LevelSetShape& shape, const IntersectionPoint& p, const AuxGrid& grid);

/// Sets nudged_position on every record that needs derivative evaluation:
/// all records for Robin conditions, layer-2 records always.
void assign_nudges(const LevelSetShape& shape, std::span<IntersectionPoint> pairs,
                   const AuxGrid& grid, BcKind kind);

/// sum_j u_j phi_j(x_b) = g(x_b), evaluated exactly at x_b.
SparseRow dirichlet_row(const IntersectionPoint& p, const PointSets& sets, const ScalarField& g);

/// sum_j u_j (n . grad phi_j + alpha phi_j) = g, at the nudged position. The
/// caller passes the normal; g is evaluated at the nudged position.
SparseRow robin_row(const IntersectionPoint& p, Vec2 normal, const PointSets& sets,
                    double alpha_coeff, const ScalarField& g);

/// sum_j u_j (Delta - sigma) phi_j = f at the nudged position (degree 3 only).
SparseRow compatibility_row(const IntersectionPoint& p, const PointSets& sets, double sigma,
                            const ScalarField& f);

}  // namespace localdpm

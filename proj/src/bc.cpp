#include "localdpm/bc.hpp"

#include <cmath>
#include <sstream>

#include "localdpm/basis.hpp"
#include "localdpm/error.hpp"

namespace localdpm {

double SparseRow::dot(std::span<const double> density) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i) acc += vals[i] * density[cols[i]];
  return acc;
}

namespace {

std::string point_str(Vec2 p) {
  std::ostringstream s;
  s.precision(17);
  s << "(" << p.x << "," << p.y << ")";
  return s.str();
}

// Signed distance margins of q to the four lines of the open cell, in units of h.
double cell_margin(const AuxGrid& grid, Cell c, Vec2 q) {
  const double h = grid.h();
  const double x0 = grid.x(c.ix), y0 = grid.y(c.iy);
  return std::min({q.x - x0, x0 + h - q.x, q.y - y0, y0 + h - q.y}) / h;
}

template <class Eval>
SparseRow expand(const IntersectionPoint& p, const PointSets& sets, Eval eval) {
  const AuxGrid& grid = sets.grid;
  const int degree = basis_degree(sets.order);
  SparseRow row;
  for (Node q : covering_nodes(p.support_cell, degree)) {
    const int slot = grid.is_interior(q) ? sets.zeta_slot[grid.flat(q)] : -1;
    if (slot < 0) {
      fail(ErrorCode::Completeness, "basis node (" + std::to_string(q.ix) + "," +
                                        std::to_string(q.iy) +
                                        ") covering a boundary point is not in zeta");
    }
    const double v = eval(TensorBasisNode{q, degree});
    if (v == 0.0) continue;
    row.cols.push_back(slot);
    row.vals.push_back(v);
  }
  return row;
}

const Vec2& nudged(const IntersectionPoint& p) {
  if (!p.nudged_position) {
    fail(ErrorCode::Breakpoint,
         "derivative row requested at un-nudged boundary point " + point_str(p.position));
  }
  return *p.nudged_position;
}

}  // namespace

Vec2 nudge_into_cell(const LevelSetShape& shape, const IntersectionPoint& p, const AuxGrid& grid) {
  const double h = grid.h();
  const Cell cell = p.support_cell;
  const Vec2 n = outward_normal(shape, p.position, h);
  Vec2 tangent{-n.y, n.x};
  // Point the tangent towards the cell center.
  const Vec2 center{grid.x(cell.ix) + 0.5 * h, grid.y(cell.iy) + 0.5 * h};
  if (dot(tangent, center - p.position) < 0.0) tangent = -1.0 * tangent;

  auto reroot = [&](Vec2 q) {
    const Vec2 g = shape.has_gradient() ? shape.gradient(q) : outward_normal(shape, q, h);
    const double g2 = dot(g, g);
    if (!(g2 > 0.0)) return q;
    return q - (shape(q) / g2) * g;
  };

  double step = 1e-3 * h;
  int doublings = 0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const Vec2 q = reroot(p.position + step * tangent);
    const double margin = cell_margin(grid, cell, q);
    if (margin > 1e-9) return q;
    if (margin < -1e-9) {
      step *= 0.5;
      continue;
    }
    if (doublings == 3) break;
    ++doublings;
    step *= 2.0;
  }
  // The boundary only touches the cell at a corner: step straight towards
  // the center instead, leaving the curve by a fraction of 1e-3 h.
  const Vec2 to_center = center - p.position;
  const double dist = norm(to_center);
  if (dist > 0.0) {
    const Vec2 q = p.position + (1e-3 * h / dist) * to_center;
    if (cell_margin(grid, cell, q) > 1e-9) return q;
  }
  fail(ErrorCode::Breakpoint,
       "could not move boundary point " + point_str(p.position) + " off the grid lines");
}

void assign_nudges(const LevelSetShape& shape, std::span<IntersectionPoint> pairs,
                   const AuxGrid& grid, BcKind kind) {
  for (IntersectionPoint& p : pairs) {
    if (p.layer == 2 || kind == BcKind::Robin) p.nudged_position = nudge_into_cell(shape, p, grid);
  }
}

SparseRow dirichlet_row(const IntersectionPoint& p, const PointSets& sets, const ScalarField& g) {
  // x_b sits exactly on a grid line, where the factor across the line is a
  // Kronecker delta; using it directly keeps off-line entries exactly zero.
  const AuxGrid& grid = sets.grid;
  SparseRow row = expand(p, sets, [&](const TensorBasisNode& b) {
    if (p.axis == Axis::X) {
      if (b.node.iy != p.edge_start.iy) return 0.0;
      return phi(b.degree, p.position.x - grid.x(b.node.ix), grid.h());
    }
    if (b.node.ix != p.edge_start.ix) return 0.0;
    return phi(b.degree, p.position.y - grid.y(b.node.iy), grid.h());
  });
  row.rhs = g(p.position);
  return row;
}

SparseRow robin_row(const IntersectionPoint& p, Vec2 normal, const PointSets& sets,
                    double alpha_coeff, const ScalarField& g) {
  const Vec2 x = nudged(p);
  SparseRow row = expand(p, sets, [&](const TensorBasisNode& b) {
    return dot(normal, tensor_grad(sets.grid, b, x)) + alpha_coeff * tensor_value(sets.grid, b, x);
  });
  row.rhs = g(x);
  return row;
}

SparseRow compatibility_row(const IntersectionPoint& p, const PointSets& sets, double sigma,
                            const ScalarField& f) {
  require(basis_degree(sets.order) == 3, ErrorCode::InvalidParameter,
          "compatibility rows need the cubic basis");
  const Vec2 x = nudged(p);
  SparseRow row = expand(p, sets, [&](const TensorBasisNode& b) {
    return tensor_laplacian(sets.grid, b, x) - sigma * tensor_value(sets.grid, b, x);
  });
  row.rhs = f(x);
  return row;
}

}  // namespace localdpm

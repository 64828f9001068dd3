#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "localdpm/aux_grid.hpp"
#include "localdpm/vec2.hpp"

namespace localdpm {

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

/// Implicit domain Omega = {psi < 0}, boundary Gamma = {psi = 0}.
class LevelSetShape {
 public:
  LevelSetShape(std::string descriptor, ScalarField psi,
                std::optional<VectorField> gradient = std::nullopt)
      : descriptor_(std::move(descriptor)),
        psi_(std::move(psi)),
        gradient_(std::move(gradient)) {}

  double operator()(Vec2 p) const { return psi_(p); }
  bool inside(Vec2 p) const { return psi_(p) < 0.0; }

  bool has_gradient() const { return gradient_.has_value(); }
  Vec2 gradient(Vec2 p) const { return (*gradient_)(p); }

  const std::string& descriptor() const { return descriptor_; }

 private:
  std::string descriptor_;
  ScalarField psi_;
  std::optional<VectorField> gradient_;
};

LevelSetShape make_ellipse(double alpha);
LevelSetShape make_circle(double radius = 1.0, Vec2 center = {});
/// Unit disc with two circular holes; psi is the product of the three quadratics.
LevelSetShape make_multi_connected();
LevelSetShape make_triangle(Vec2 v1, Vec2 v2, Vec2 v3);
/// The triangle (0.5,0.9), (0.9,-0.2), (-0.9,-0.9).
LevelSetShape make_reference_triangle();

/// "ellipse" (uses alpha), "circle", "multi", "triangle".
LevelSetShape shape_from_key(std::string_view key, double alpha = 10.0);

/// Which family of grid lines an intersection lies on. `X`: a line parallel
/// to the x-axis (constant y); `Y`: a line parallel to the y-axis.
enum class Axis { X, Y };

struct RawIntersection {
  Vec2 position;
  Axis axis = Axis::X;
  /// The edge runs from `edge_start` one step in +x (Axis::X) or +y (Axis::Y).
  Node edge_start;
  /// Position along the edge in [0, 1].
  double t = 0.0;
};

/// A boundary point paired with one gamma^- node.
struct IntersectionPoint {
  Vec2 position;
  int owner = -1;  // flat index of the paired gamma^- node
  Axis axis = Axis::X;
  int layer = 1;
  Cell support_cell;
  std::optional<Vec2> nudged_position;
  /// The grid edge carrying the point, as in RawIntersection.
  Node edge_start;
  double t = 0.0;
};

/// Bisection for the sign change of `shape` on segment [a, b]; exactly one
/// endpoint must be inside. Stops when the bracket is shorter than `tol`.
Vec2 find_root_on_segment(const LevelSetShape& shape, Vec2 a, Vec2 b, double tol,
                          int max_iterations = 200);

/// Strict: an edge with two sign changes among its endpoints and 8 interior
/// samples is a geometry-resolution error. Tolerant: such edges are recorded
/// as unresolved; when both endpoints lie on the same side the hidden sliver
/// is skipped, as the node classification cannot see it either.
enum class GuardMode { Strict, Tolerant };

/// Grid edge from `start` to its +x (Axis::X) or +y neighbour that Gamma
/// crosses more than once.
struct UnresolvedEdge {
  Node start;
  Axis axis;
};

/// All Gamma crossings of grid edges, ordered x-parallel lines first (by row,
/// then x), then y-parallel lines (by column, then y). `unresolved`, when
/// given, receives the edges accepted by the tolerant guard.
std::vector<RawIntersection> grid_line_intersections(
    const LevelSetShape& shape, const AuxGrid& grid, GuardMode mode = GuardMode::Strict,
    std::vector<UnresolvedEdge>* unresolved = nullptr);

/// grad(psi)/|grad(psi)|, analytic when available, else central differences
/// with step h/100.
Vec2 outward_normal(const LevelSetShape& shape, Vec2 p, double h);

}  // namespace localdpm

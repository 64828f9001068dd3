#include "localdpm/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "localdpm/error.hpp"

namespace localdpm {

LevelSetShape make_ellipse(double alpha) {
  require(alpha > 0.0, ErrorCode::InvalidParameter, "ellipse aspect ratio must be positive");
  const double a2 = alpha * alpha;
  std::ostringstream name;
  name << "ellipse(alpha=" << alpha << ")";
  return LevelSetShape(
      name.str(), [a2](Vec2 p) { return p.x * p.x + a2 * p.y * p.y - 1.0; },
      [a2](Vec2 p) { return Vec2{2.0 * p.x, 2.0 * a2 * p.y}; });
}

LevelSetShape make_circle(double radius, Vec2 center) {
  require(radius > 0.0, ErrorCode::InvalidParameter, "circle radius must be positive");
  const double r2 = radius * radius;
  return LevelSetShape(
      "circle",
      [r2, center](Vec2 p) {
        const Vec2 d = p - center;
        return d.x * d.x + d.y * d.y - r2;
      },
      [center](Vec2 p) { return 2.0 * (p - center); });
}

LevelSetShape make_multi_connected() {
  auto factors = [](Vec2 p) {
    const double y2 = p.y - 0.5;
    const double x3 = p.x + 0.3;
    const double y3 = p.y + 0.4;
    return std::array<double, 3>{p.x * p.x + p.y * p.y - 1.0,
                                 4.0 * p.x * p.x + 4.0 * y2 * y2 - 1.0,
                                 16.0 * x3 * x3 + 16.0 * y3 * y3 - 1.0};
  };
  return LevelSetShape(
      "multi",
      [factors](Vec2 p) {
        const auto f = factors(p);
        return f[0] * f[1] * f[2];
      },
      [factors](Vec2 p) {
        const auto f = factors(p);
        const Vec2 g1{2.0 * p.x, 2.0 * p.y};
        const Vec2 g2{8.0 * p.x, 8.0 * (p.y - 0.5)};
        const Vec2 g3{32.0 * (p.x + 0.3), 32.0 * (p.y + 0.4)};
        return (f[1] * f[2]) * g1 + (f[0] * f[2]) * g2 + (f[0] * f[1]) * g3;
      });
}

LevelSetShape make_triangle(Vec2 v1, Vec2 v2, Vec2 v3) {
  const double det = (v2.x - v1.x) * (v3.y - v1.y) - (v3.x - v1.x) * (v2.y - v1.y);
  const double scale = std::max({norm(v2 - v1), norm(v3 - v1), norm(v3 - v2)});
  require(std::abs(det) > 1e-12 * scale * scale, ErrorCode::InvalidParameter,
          "triangle vertices are collinear");

  // Barycentric weights of v2 and v3; psi = -min of the three weights.
  const Vec2 g1{(v3.y - v1.y) / det, -(v3.x - v1.x) / det};
  const Vec2 g2{-(v2.y - v1.y) / det, (v2.x - v1.x) / det};
  auto weights = [=](Vec2 p) {
    const Vec2 d = p - v1;
    const double w1 = dot(g1, d);
    const double w2 = dot(g2, d);
    return std::array<double, 3>{w1, w2, 1.0 - w1 - w2};
  };
  auto active = [weights](Vec2 p) {
    const auto w = weights(p);
    return static_cast<int>(std::min_element(w.begin(), w.end()) - w.begin());
  };
  return LevelSetShape(
      "triangle",
      [weights](Vec2 p) {
        const auto w = weights(p);
        return -std::min({w[0], w[1], w[2]});
      },
      [=](Vec2 p) {
        switch (active(p)) {
          case 0: return -1.0 * g1;
          case 1: return -1.0 * g2;
          default: return g1 + g2;
        }
      });
}

LevelSetShape make_reference_triangle() {
  return make_triangle({0.5, 0.9}, {0.9, -0.2}, {-0.9, -0.9});
}

LevelSetShape shape_from_key(std::string_view key, double alpha) {
  if (key == "ellipse") return make_ellipse(alpha);
  if (key == "circle") return make_circle();
  if (key == "multi") return make_multi_connected();
  if (key == "triangle") return make_reference_triangle();
  fail(ErrorCode::InvalidParameter, "unknown shape key '" + std::string(key) + "'");
}

Vec2 find_root_on_segment(const LevelSetShape& shape, Vec2 a, Vec2 b, double tol,
                          int max_iterations) {
  const bool a_in = shape.inside(a);
  const bool b_in = shape.inside(b);
  require(a_in != b_in, ErrorCode::InvalidParameter, "segment does not bracket the boundary");
  Vec2 out = a_in ? b : a;
  Vec2 in = a_in ? a : b;
  for (int it = 0; it < max_iterations; ++it) {
    if (norm(in - out) <= tol) return 0.5 * (in + out);
    const Vec2 mid = 0.5 * (in + out);
    if (shape.inside(mid)) {
      in = mid;
    } else {
      out = mid;
    }
  }
  std::ostringstream msg;
  msg << "bisection did not converge on segment (" << a.x << "," << a.y << ")-(" << b.x
      << "," << b.y << ")";
  fail(ErrorCode::GeometryResolution, msg.str());
}

namespace {

constexpr int kGuardSamples = 8;

// Bisection in the edge parameter so that the off-axis coordinate stays
// exactly on the grid line.
double bisect_edge(const LevelSetShape& shape, Vec2 start, Axis axis, double h, bool start_in,
                   double tol) {
  auto at = [&](double t) {
    return axis == Axis::X ? Vec2{start.x + t * h, start.y} : Vec2{start.x, start.y + t * h};
  };
  double t_in = start_in ? 0.0 : 1.0;
  double t_out = start_in ? 1.0 : 0.0;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(t_in - t_out) * h <= tol) return 0.5 * (t_in + t_out);
    const double mid = 0.5 * (t_in + t_out);
    if (shape.inside(at(mid))) {
      t_in = mid;
    } else {
      t_out = mid;
    }
  }
  std::ostringstream msg;
  msg << "bisection did not converge on edge starting at (" << start.x << "," << start.y << ")";
  fail(ErrorCode::GeometryResolution, msg.str());
}

// Number of sign changes seen along the edge through 8 interior samples.
int guard_edge(const LevelSetShape& shape, Vec2 start, Axis axis, double h, bool start_in,
               bool end_in, const Node& node, GuardMode mode) {
  int changes = 0;
  bool prev = start_in;
  for (int s = 1; s <= kGuardSamples + 1; ++s) {
    bool cur;
    if (s == kGuardSamples + 1) {
      cur = end_in;
    } else {
      const double t = static_cast<double>(s) / (kGuardSamples + 1);
      cur = shape.inside(axis == Axis::X ? Vec2{start.x + t * h, start.y}
                                         : Vec2{start.x, start.y + t * h});
    }
    if (cur != prev) ++changes;
    prev = cur;
  }
  if (changes >= 2 && mode == GuardMode::Strict) {
    std::ostringstream msg;
    msg << "boundary crosses the " << (axis == Axis::X ? "x" : "y")
        << "-parallel edge starting at node (" << node.ix << "," << node.iy
        << ") more than once; refine the grid";
    fail(ErrorCode::GeometryResolution, msg.str());
  }
  return changes;
}

}  // namespace

std::vector<RawIntersection> grid_line_intersections(const LevelSetShape& shape,
                                                     const AuxGrid& grid, GuardMode mode,
                                                     std::vector<UnresolvedEdge>* unresolved) {
  const int n = grid.n();
  const int m = n + 2;
  const double h = grid.h();
  const double tol = 1e-12 * h;

  std::vector<char> in(static_cast<std::size_t>(m) * m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) in[iy * m + ix] = shape.inside(grid.position({ix, iy}));

  std::vector<RawIntersection> out;
  if (unresolved != nullptr) unresolved->clear();
  auto scan = [&](Node a, Node b, Axis axis) {
    const bool a_in = in[a.iy * m + a.ix];
    const bool b_in = in[b.iy * m + b.ix];
    const Vec2 start = grid.position(a);
    const int changes = guard_edge(shape, start, axis, h, a_in, b_in, a, mode);
    if (changes >= 2 && unresolved != nullptr) unresolved->push_back({a, axis});
    if (a_in == b_in) return;
    const double t = bisect_edge(shape, start, axis, h, a_in, tol);
    const Vec2 pos = axis == Axis::X ? Vec2{start.x + t * h, start.y} : Vec2{start.x, start.y + t * h};
    out.push_back({pos, axis, a, t});
  };
  for (int iy = 1; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix) scan({ix, iy}, {ix + 1, iy}, Axis::X);
  for (int ix = 1; ix <= n; ++ix)
    for (int iy = 0; iy <= n; ++iy) scan({ix, iy}, {ix, iy + 1}, Axis::Y);
  return out;
}

Vec2 outward_normal(const LevelSetShape& shape, Vec2 p, double h) {
  Vec2 g;
  if (shape.has_gradient()) {
    g = shape.gradient(p);
  } else {
    const double d = h / 100.0;
    g = {(shape({p.x + d, p.y}) - shape({p.x - d, p.y})) / (2.0 * d),
         (shape({p.x, p.y + d}) - shape({p.x, p.y - d})) / (2.0 * d)};
  }
  const double len = norm(g);
  if (!(len >= 1e-10)) {
    std::ostringstream msg;
    msg << "level-set gradient vanishes at (" << p.x << "," << p.y << ")";
    fail(ErrorCode::DegenerateNormal, msg.str());
  }
  return (1.0 / len) * g;
}

}  // namespace localdpm

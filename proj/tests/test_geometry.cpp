#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "localdpm/geometry.hpp"
#include "test_util.hpp"

using namespace localdpm;
using localdpm::testing::code_of;

TEST(Shapes, EllipseSigns) {
  const LevelSetShape s = make_ellipse(10.0);
  EXPECT_TRUE(s.inside({0.0, 0.0}));
  EXPECT_TRUE(s.inside({0.99, 0.0}));
  EXPECT_FALSE(s.inside({0.0, 0.11}));
  EXPECT_NEAR(s({0.0, 0.1}), 0.0, 1e-14);
  EXPECT_NEAR(s({1.0, 0.0}), 0.0, 1e-14);
}

TEST(Shapes, MultiConnectedHoles) {
  const LevelSetShape s = make_multi_connected();
  EXPECT_TRUE(s.inside({0.6, -0.1}));
  EXPECT_FALSE(s.inside({0.0, 0.5}));    // upper hole
  EXPECT_FALSE(s.inside({-0.3, -0.4}));  // lower hole
  EXPECT_FALSE(s.inside({1.05, 0.0}));   // outside the disc
  // The upper hole touches the unit circle at (0, 1).
  EXPECT_NEAR(s({0.0, 1.0}), 0.0, 1e-15);
}

TEST(Shapes, TriangleLevelSet) {
  const LevelSetShape s = make_reference_triangle();
  const Vec2 v[3] = {{0.5, 0.9}, {0.9, -0.2}, {-0.9, -0.9}};
  const Vec2 centroid{(v[0].x + v[1].x + v[2].x) / 3, (v[0].y + v[1].y + v[2].y) / 3};
  EXPECT_TRUE(s.inside(centroid));
  for (const Vec2& p : v) EXPECT_NEAR(s(p), 0.0, 1e-14);
  // Edge midpoints are on Gamma, points pushed outward are outside.
  for (int k = 0; k < 3; ++k) {
    const Vec2 m = 0.5 * (v[k] + v[(k + 1) % 3]);
    EXPECT_NEAR(s(m), 0.0, 1e-14);
    EXPECT_FALSE(s.inside(m + 0.01 * (m - centroid)));
  }
}

TEST(Shapes, CollinearTriangleRejected) {
  EXPECT_EQ(code_of([] { make_triangle({0, 0}, {1, 1}, {2, 2}); }), ErrorCode::InvalidParameter);
}

TEST(Shapes, KeyLookup) {
  EXPECT_EQ(shape_from_key("circle").descriptor(), "circle");
  EXPECT_EQ(code_of([] { shape_from_key("hexagon"); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { make_ellipse(-1.0); }), ErrorCode::InvalidParameter);
}

TEST(RootFinding, CircleRoot) {
  const LevelSetShape s = make_circle();
  const Vec2 r = find_root_on_segment(s, {0.2, 0.1}, {1.7, 0.4}, 1e-13);
  EXPECT_NEAR(norm(r), 1.0, 1e-12);
  EXPECT_EQ(code_of([&] { find_root_on_segment(s, {2, 0}, {3, 0}, 1e-12); }),
            ErrorCode::InvalidParameter);
}

TEST(Intersections, MatchBruteForceEdgeScan) {
  const LevelSetShape s = make_circle(0.77, {0.05, -0.03});
  const AuxGrid grid = build_grid(Bounds::square(1.0), 40);
  const auto raw = grid_line_intersections(s, grid);

  // Independent count: every edge with endpoints on opposite sides.
  int expected = 0;
  const int n = grid.n();
  for (int iy = 1; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix)
      expected += s.inside(grid.position({ix, iy})) != s.inside(grid.position({ix + 1, iy}));
  for (int ix = 1; ix <= n; ++ix)
    for (int iy = 0; iy <= n; ++iy)
      expected += s.inside(grid.position({ix, iy})) != s.inside(grid.position({ix, iy + 1}));
  ASSERT_EQ(static_cast<int>(raw.size()), expected);

  bool seen_y = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawIntersection& q = raw[i];
    const double dist = norm(q.position - Vec2{0.05, -0.03});
    EXPECT_NEAR(dist, 0.77, 1e-11);
    EXPECT_GE(q.t, 0.0);
    EXPECT_LE(q.t, 1.0);
    const Vec2 a = grid.position(q.edge_start);
    if (q.axis == Axis::X) {
      EXPECT_FALSE(seen_y) << "x-parallel crossings come first";
      EXPECT_DOUBLE_EQ(q.position.y, a.y);
      EXPECT_NEAR(q.position.x, a.x + q.t * grid.h(), 1e-14);
    } else {
      seen_y = true;
      EXPECT_DOUBLE_EQ(q.position.x, a.x);
      EXPECT_NEAR(q.position.y, a.y + q.t * grid.h(), 1e-14);
    }
  }
}

TEST(Intersections, StrictGuardRejectsDoubleCrossing) {
  // A thin ellipse whose tip pokes through one grid edge.
  const LevelSetShape s = make_ellipse(30.0);
  const AuxGrid grid = build_grid(Bounds::square(1.2), 24);
  EXPECT_EQ(code_of([&] { grid_line_intersections(s, grid); }), ErrorCode::GeometryResolution);

  std::vector<UnresolvedEdge> unresolved;
  grid_line_intersections(s, grid, GuardMode::Tolerant, &unresolved);
  EXPECT_FALSE(unresolved.empty());
  for (const UnresolvedEdge& e : unresolved) {
    // Both endpoints lie on the same side, yet Gamma crosses in between.
    const Node b = e.axis == Axis::X ? Node{e.start.ix + 1, e.start.iy}
                                     : Node{e.start.ix, e.start.iy + 1};
    EXPECT_EQ(s.inside(grid.position(e.start)), s.inside(grid.position(b)));
  }
}

TEST(Intersections, MultiDomainNeedsTolerantGuard) {
  const LevelSetShape s = make_multi_connected();
  const AuxGrid grid = build_grid(Bounds::square(1.15), 64);
  EXPECT_EQ(code_of([&] { grid_line_intersections(s, grid); }), ErrorCode::GeometryResolution);
  std::vector<UnresolvedEdge> unresolved;
  EXPECT_NO_THROW(grid_line_intersections(s, grid, GuardMode::Tolerant, &unresolved));
  ASSERT_FALSE(unresolved.empty());
  // All of them sit in the crescent near the tangency point.
  for (const UnresolvedEdge& e : unresolved) {
    const Vec2 p = grid.position(e.start);
    EXPECT_LT(norm(p - Vec2{0.0, 1.0}), 0.5);
  }
}

TEST(Normals, AnalyticAndFiniteDifferenceAgree) {
  const LevelSetShape analytic = make_ellipse(3.0);
  const LevelSetShape numeric("ellipse-fd", [](Vec2 p) { return p.x * p.x + 9 * p.y * p.y - 1; });
  for (int k = 0; k < 16; ++k) {
    const double th = 2 * std::numbers::pi * k / 16 + 0.1;
    const Vec2 p{std::cos(th), std::sin(th) / 3};
    const Vec2 a = outward_normal(analytic, p, 0.01);
    const Vec2 b = outward_normal(numeric, p, 0.01);
    EXPECT_NEAR(norm(a), 1.0, 1e-14);
    EXPECT_NEAR(a.x, b.x, 1e-9);
    EXPECT_NEAR(a.y, b.y, 1e-9);
    EXPECT_GT(dot(a, p), 0.0);
  }
}

TEST(Normals, DegenerateGradient) {
  const LevelSetShape flat("flat", [](Vec2) { return 0.0; });
  EXPECT_EQ(code_of([&] { outward_normal(flat, {0, 0}, 0.1); }), ErrorCode::DegenerateNormal);
}

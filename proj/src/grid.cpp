#include "localdpm/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "localdpm/error.hpp"

namespace localdpm {

AuxGrid build_grid(const Bounds& bounds, int n) {
  const double wx = bounds.x1 - bounds.x0;
  const double wy = bounds.y1 - bounds.y0;
  require(n >= 1, ErrorCode::InvalidParameter, "grid needs at least one interior node");
  require(wx > 0.0 && wy > 0.0, ErrorCode::InvalidParameter, "bounds must have positive extent");
  require(std::abs(wx - wy) <= 1e-12 * wx, ErrorCode::InvalidParameter,
          "auxiliary bounds must be square");
  return AuxGrid(bounds, n);
}

int PointSets::m_plus_count() const {
  return static_cast<int>(std::count_if(flags.begin(), flags.end(),
                                        [](std::uint16_t f) { return (f & kMPlus) != 0; }));
}

namespace {

std::string node_str(Node p) {
  return "(" + std::to_string(p.ix) + "," + std::to_string(p.iy) + ")";
}

// Whether the cross stencil of radius r around p touches an interior node
// with / without the M+ bit.
struct CrossHits {
  bool plus = false;
  bool minus = false;
};

CrossHits cross_hits(const AuxGrid& grid, const std::vector<std::uint16_t>& flags, Node p,
                     int r) {
  CrossHits hits;
  auto visit = [&](Node q) {
    if (!grid.is_interior(q)) return;
    if (flags[grid.flat(q)] & kMPlus) {
      hits.plus = true;
    } else {
      hits.minus = true;
    }
  };
  visit(p);
  for (int s = 1; s <= r; ++s) {
    visit({p.ix - s, p.iy});
    visit({p.ix + s, p.iy});
    visit({p.ix, p.iy - s});
    visit({p.ix, p.iy + s});
  }
  return hits;
}

}  // namespace

PointSets classify_points(const AuxGrid& grid, const LevelSetShape& shape, Order order,
                          std::span<const UnresolvedEdge> unresolved) {
  const int n = grid.n();
  const int r = stencil_radius(order);
  PointSets s;
  s.grid = grid;
  s.order = order;
  s.flags.assign(static_cast<std::size_t>(grid.interior_count()), 0);

  int inside = 0;
  for (int f = 0; f < grid.interior_count(); ++f) {
    if (shape.inside(grid.position(grid.node(f)))) {
      s.flags[f] |= kMPlus;
      ++inside;
    }
  }
  for (const UnresolvedEdge& e : unresolved) {
    const bool along_x = e.axis == Axis::X;
    for (int dy = along_x ? -1 : 0; dy <= 1; ++dy) {
      for (int dx = along_x ? 0 : -1; dx <= 1; ++dx) {
        const Node q{e.start.ix + dx, e.start.iy + dy};
        if (!grid.is_interior(q)) continue;
        const int f = grid.flat(q);
        if (s.flags[f] & kMPlus) {
          s.flags[f] &= static_cast<std::uint16_t>(~kMPlus);
          --inside;
        }
      }
    }
  }
  require(inside > 0, ErrorCode::EmptyInterior, "no grid node lies inside the domain");

  for (int f = 0; f < grid.interior_count(); ++f) {
    if (!(s.flags[f] & kMPlus)) continue;
    const Node p = grid.node(f);
    const int d = std::min({p.ix, n + 1 - p.ix, p.iy, n + 1 - p.iy});
    if (d < r + 2) {
      fail(ErrorCode::DomainMargin, "interior node " + node_str(p) +
                                        " is too close to the auxiliary boundary");
    }
  }

  for (int f = 0; f < grid.interior_count(); ++f) {
    const Node p = grid.node(f);
    const CrossHits hits = cross_hits(grid, s.flags, p, r);
    if (hits.plus) s.flags[f] |= kNPlus;
    if (hits.minus) s.flags[f] |= kNMinus;
    if (!(hits.plus && hits.minus)) continue;
    s.flags[f] |= kGamma;
    s.gamma.push_back(f);
    if (s.flags[f] & kMPlus) {
      s.gamma_plus.push_back(f);
      continue;
    }
    s.gamma_minus.push_back(f);
    bool first_layer = true;
    if (r > 1) {
      const CrossHits inner = cross_hits(grid, s.flags, p, 1);
      first_layer = inner.plus && inner.minus;
    }
    if (first_layer) {
      s.flags[f] |= kGammaMinus1;
      s.gamma_minus_1.push_back(f);
    } else {
      s.flags[f] |= kGammaMinus2;
      s.gamma_minus_2.push_back(f);
    }
  }
  return s;
}

Cell support_cell(const RawIntersection& p, const AuxGrid&) {
  const Node a = p.edge_start;
  if (p.axis == Axis::Y) return {a.ix - 1, p.t > 0.0 ? a.iy : a.iy - 1};
  return {p.t > 0.0 ? a.ix : a.ix - 1, a.iy - 1};
}

Cell support_cell(const IntersectionPoint& p, const AuxGrid& grid) {
  return support_cell(RawIntersection{p.position, p.axis, p.edge_start, p.t}, grid);
}

namespace {

struct Candidate {
  int index = -1;
  double distance = 0.0;
  Axis axis = Axis::X;
  double coordinate = 0.0;
};

bool better(const Candidate& a, const Candidate& b, double tie) {
  if (b.index < 0) return true;
  if (std::abs(a.distance - b.distance) > tie) return a.distance < b.distance;
  if (a.axis != b.axis) return a.axis == Axis::X;
  return a.coordinate < b.coordinate;
}

}  // namespace

std::vector<IntersectionPoint> pair_intersections(const PointSets& sets,
                                                  std::span<const RawIntersection> raw) {
  const AuxGrid& grid = sets.grid;
  const int n = grid.n();
  const double h = grid.h();

  // Buckets per grid line: rows for x-parallel lines, columns for y-parallel.
  std::vector<std::vector<int>> rows(n + 2), cols(n + 2);
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    const RawIntersection& q = raw[i];
    if (q.axis == Axis::X) {
      rows[q.edge_start.iy].push_back(i);
    } else {
      cols[q.edge_start.ix].push_back(i);
    }
  }

  // Closest intersection on the two grid lines through the node, skipping
  // indices marked in `taken`.
  auto nearest_candidate = [&](int flat, int layer, const std::vector<char>* taken) {
    const Node p = grid.node(flat);
    const Vec2 xp = grid.position(p);
    const double reach = layer * h * (1.0 + 1e-9);
    Candidate best;
    auto consider = [&](const Candidate& c) {
      if (c.distance > reach || (taken != nullptr && (*taken)[c.index])) return;
      if (better(c, best, 1e-12 * h)) best = c;
    };
    for (int i : rows[p.iy]) consider({i, std::abs(raw[i].position.x - xp.x), Axis::X, raw[i].position.x});
    for (int i : cols[p.ix]) consider({i, std::abs(raw[i].position.y - xp.y), Axis::Y, raw[i].position.y});
    return best;
  };
  auto nearest = [&](int flat, int layer) { return nearest_candidate(flat, layer, nullptr).index; };

  auto make = [&](int raw_index, int owner, int layer) {
    const RawIntersection& q = raw[raw_index];
    IntersectionPoint ip;
    ip.position = q.position;
    ip.owner = owner;
    ip.axis = q.axis;
    ip.layer = layer;
    ip.edge_start = q.edge_start;
    ip.t = q.t;
    ip.support_cell = support_cell(q, grid);
    return ip;
  };

  std::vector<IntersectionPoint> out;
  const std::size_t first = sets.gamma_minus_1.size();
  std::vector<Candidate> choice(first);
  std::vector<int> claims(raw.size(), 0);
  for (std::size_t k = 0; k < first; ++k) {
    choice[k] = nearest_candidate(sets.gamma_minus_1[k], 1, nullptr);
    if (choice[k].index < 0) {
      fail(ErrorCode::Pairing, "no boundary intersection within reach of node " +
                                   node_str(grid.node(sets.gamma_minus_1[k])));
    }
    ++claims[choice[k].index];
  }
  // Two first-layer nodes on either side of one edge (possible next to
  // unresolved edges) would give identical rows. The closer node keeps the
  // point; the other moves to its nearest unclaimed intersection if it has one.
  std::vector<char> taken(raw.size(), 0);
  for (std::size_t k = 0; k < first; ++k) taken[choice[k].index] = 1;
  std::vector<int> owner(raw.size(), -1);
  for (std::size_t k = 0; k < first; ++k) {
    const int i = choice[k].index;
    if (claims[i] < 2) continue;
    if (owner[i] < 0 || choice[k].distance < choice[owner[i]].distance) owner[i] = static_cast<int>(k);
  }
  std::vector<int> layer1_raw;
  for (std::size_t k = 0; k < first; ++k) {
    int i = choice[k].index;
    if (claims[i] > 1 && owner[i] != static_cast<int>(k)) {
      const Candidate alt = nearest_candidate(sets.gamma_minus_1[k], 1, &taken);
      if (alt.index >= 0) {
        i = alt.index;
        taken[i] = 1;
      }
    }
    layer1_raw.push_back(i);
    out.push_back(make(i, sets.gamma_minus_1[k], 1));
  }
  for (int f : sets.gamma_minus_2) {
    int i = nearest(f, 2);
    if (i < 0) {
      // Borrow from the closest first-layer node.
      const Node p = grid.node(f);
      long best = std::numeric_limits<long>::max();
      for (std::size_t k = 0; k < sets.gamma_minus_1.size(); ++k) {
        const Node q = grid.node(sets.gamma_minus_1[k]);
        const long dx = q.ix - p.ix;
        const long dy = q.iy - p.iy;
        if (dx * dx + dy * dy < best) {
          best = dx * dx + dy * dy;
          i = layer1_raw[k];
        }
      }
      if (i < 0) {
        fail(ErrorCode::Pairing,
             "no boundary intersection within reach of node " + node_str(p));
      }
    }
    out.push_back(make(i, f, 2));
  }
  return out;
}

std::vector<Node> covering_nodes(Cell cell, int degree) {
  std::vector<Node> nodes;
  const int lo = degree == 1 ? 0 : -1;
  const int hi = degree == 1 ? 1 : 2;
  nodes.reserve(static_cast<std::size_t>((hi - lo + 1) * (hi - lo + 1)));
  for (int dy = lo; dy <= hi; ++dy)
    for (int dx = lo; dx <= hi; ++dx) nodes.push_back({cell.ix + dx, cell.iy + dy});
  return nodes;
}

void build_eta_omega(PointSets& sets, std::span<const IntersectionPoint> pairs) {
  const AuxGrid& grid = sets.grid;
  const int degree = basis_degree(sets.order);
  for (auto& f : sets.flags) f &= static_cast<std::uint16_t>(~(kEta | kOmega));

  for (const IntersectionPoint& ip : pairs) {
    for (Node q : covering_nodes(ip.support_cell, degree)) {
      if (!grid.is_interior(q)) {
        fail(ErrorCode::DomainMargin,
             "support block of a boundary point reaches the auxiliary boundary at " +
                 node_str(q));
      }
      const int f = grid.flat(q);
      if (sets.flags[f] & kGamma) continue;
      sets.flags[f] |= (sets.flags[f] & kMPlus) ? kOmega : kEta;
    }
  }

  sets.eta.clear();
  sets.omega.clear();
  for (int f = 0; f < grid.interior_count(); ++f) {
    if (sets.flags[f] & kEta) sets.eta.push_back(f);
    if (sets.flags[f] & kOmega) sets.omega.push_back(f);
  }

  sets.zeta.clear();
  sets.zeta.insert(sets.zeta.end(), sets.eta.begin(), sets.eta.end());
  sets.zeta.insert(sets.zeta.end(), sets.gamma.begin(), sets.gamma.end());
  sets.zeta.insert(sets.zeta.end(), sets.omega.begin(), sets.omega.end());

  // Stencils of zeta nodes must stay inside the interior plus ring so that
  // potentials never involve the antisymmetric ghosts.
  const int r = stencil_radius(sets.order);
  for (int f : sets.zeta) {
    const Node p = grid.node(f);
    if (std::min({p.ix, grid.n() + 1 - p.ix, p.iy, grid.n() + 1 - p.iy}) < r + 1) {
      fail(ErrorCode::DomainMargin,
           "discrete boundary node " + node_str(p) + " is too close to the auxiliary boundary");
    }
  }

  sets.zeta_slot.assign(static_cast<std::size_t>(grid.interior_count()), -1);
  sets.zeta_plus.clear();
  for (int i = 0; i < static_cast<int>(sets.zeta.size()); ++i) {
    sets.zeta_slot[sets.zeta[i]] = i;
    if (sets.flags[sets.zeta[i]] & kMPlus) sets.zeta_plus.push_back(i);
  }
}

namespace {

void put_double(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

}  // namespace

void write_pointsets_csv(const std::string& path, const PointSets& sets,
                         std::span<const IntersectionPoint> pairs) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "x,y,tag\n";
  const AuxGrid& grid = sets.grid;
  auto row = [&](Vec2 p, const char* tag) {
    std::string line;
    put_double(line, p.x);
    line += ',';
    put_double(line, p.y);
    line += ',';
    line += tag;
    line += '\n';
    out << line;
  };
  for (int f : sets.gamma_plus) row(grid.position(grid.node(f)), "gamma_plus");
  for (int f : sets.gamma_minus_1) row(grid.position(grid.node(f)), "gamma_minus_1");
  for (int f : sets.gamma_minus_2) row(grid.position(grid.node(f)), "gamma_minus_2");
  for (int f : sets.eta) row(grid.position(grid.node(f)), "eta");
  for (int f : sets.omega) row(grid.position(grid.node(f)), "omega");
  for (const IntersectionPoint& ip : pairs) {
    row(ip.position, ip.layer == 1 ? "x_b" : "x_b_layer2");
    if (ip.nudged_position) row(*ip.nudged_position, "x_b_nudged");
  }
  require(static_cast<bool>(out), ErrorCode::Io, "write to '" + path + "' failed");
}

PointSets1D classify_points_1d(const std::vector<bool>& inside, Order order) {
  const int count = static_cast<int>(inside.size());
  const int r = stencil_radius(order);
  auto hits = [&](int i, int radius) {
    CrossHits h;
    for (int j = std::max(0, i - radius); j <= std::min(count - 1, i + radius); ++j) {
      if (inside[j]) {
        h.plus = true;
      } else {
        h.minus = true;
      }
    }
    return h;
  };
  PointSets1D s;
  for (int i = 0; i < count; ++i) {
    if (inside[i]) s.m_plus.push_back(i);
    const CrossHits h = hits(i, r);
    if (!(h.plus && h.minus)) continue;
    s.gamma.push_back(i);
    if (inside[i]) {
      s.gamma_plus.push_back(i);
      continue;
    }
    s.gamma_minus.push_back(i);
    const CrossHits inner = hits(i, 1);
    if (inner.plus && inner.minus) {
      s.gamma_minus_1.push_back(i);
    } else {
      s.gamma_minus_2.push_back(i);
    }
  }
  require(!s.m_plus.empty(), ErrorCode::EmptyInterior, "no grid node lies inside the interval");
  return s;
}

}  // namespace localdpm

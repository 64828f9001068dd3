#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "localdpm/aux_grid.hpp"
#include "localdpm/geometry.hpp"
#include "localdpm/order.hpp"

namespace localdpm {

/// Membership bits stored per interior node.
enum PointFlag : std::uint16_t {
  kMPlus = 1u << 0,
  kNPlus = 1u << 1,
  kNMinus = 1u << 2,
  kGamma = 1u << 3,
  kGammaMinus1 = 1u << 4,
  kGammaMinus2 = 1u << 5,
  kEta = 1u << 6,
  kOmega = 1u << 7,
};

/// Classified node sets. All index lists hold flat interior indices in
/// increasing order. M0 is the whole interior; M- is its complement of M+.
struct PointSets {
  AuxGrid grid;
  Order order = Order::O2;
  std::vector<std::uint16_t> flags;

  std::vector<int> gamma;
  std::vector<int> gamma_plus;
  std::vector<int> gamma_minus;
  std::vector<int> gamma_minus_1;
  std::vector<int> gamma_minus_2;  // empty for O2
  std::vector<int> eta;
  std::vector<int> omega;

  /// zeta = (eta, gamma, omega) concatenated; zeta_slot maps a flat index to
  /// its position in zeta or -1.
  std::vector<int> zeta;
  std::vector<int> zeta_slot;
  /// Positions in zeta of gamma+ followed by omega (increasing).
  std::vector<int> zeta_plus;

  bool has(int flat, PointFlag f) const { return (flags[flat] & f) != 0; }
  bool in_m_plus(int flat) const { return has(flat, kMPlus); }
  int m_plus_count() const;
};

/// M+, N+, N-, gamma and the gamma- layers from cross-shaped stencils of
/// radius n. eta/omega/zeta are left empty (see build_eta_omega).
/// Nodes of the cells on either side of an unresolved edge never join M+:
/// the grid cannot represent the sliver there.
PointSets classify_points(const AuxGrid& grid, const LevelSetShape& shape, Order order,
                          std::span<const UnresolvedEdge> unresolved = {});

/// Pairs every gamma- node with one intersection. Records are ordered: first
/// layer-1 owners (increasing flat index), then layer-2 owners.
std::vector<IntersectionPoint> pair_intersections(const PointSets& sets,
                                                  std::span<const RawIntersection> raw);

/// Left cell for crossings of y-parallel lines, lower cell for x-parallel.
Cell support_cell(const IntersectionPoint& p, const AuxGrid& grid);
Cell support_cell(const RawIntersection& p, const AuxGrid& grid);

/// Nodes whose basis functions cover the cell: 2x2 (degree 1) or 4x4 (degree 3).
std::vector<Node> covering_nodes(Cell cell, int degree);

/// Fills eta, omega, zeta, zeta_slot, zeta_plus from the support cells.
void build_eta_omega(PointSets& sets, std::span<const IntersectionPoint> pairs);

/// CSV rows x,y,tag for every classified node and intersection.
void write_pointsets_csv(const std::string& path, const PointSets& sets,
                         std::span<const IntersectionPoint> pairs);

/// 1D sets over nodes 0..count-1 (indices are positions in `inside`).
struct PointSets1D {
  std::vector<int> m_plus;
  std::vector<int> gamma;
  std::vector<int> gamma_plus;
  std::vector<int> gamma_minus;
  std::vector<int> gamma_minus_1;
  std::vector<int> gamma_minus_2;
};

PointSets1D classify_points_1d(const std::vector<bool>& inside, Order order);

}  // namespace localdpm

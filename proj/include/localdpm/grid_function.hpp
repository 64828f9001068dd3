#pragma once

#include <span>
#include <vector>

#include "localdpm/aux_grid.hpp"

namespace localdpm {

/// Values on the N x N interior, flat-indexed as AuxGrid::flat. The boundary
/// ring is implicitly zero.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(int n) : n_(n), values_(static_cast<std::size_t>(n) * n, 0.0) {}

  int n() const { return n_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](int flat) { return values_[flat]; }
  double operator[](int flat) const { return values_[flat]; }

  /// Node value including the zero ring (0 <= ix, iy <= N+1).
  double at(Node p) const {
    if (p.ix < 1 || p.iy < 1 || p.ix > n_ || p.iy > n_) return 0.0;
    return values_[(p.iy - 1) * n_ + (p.ix - 1)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

}  // namespace localdpm

#pragma once

#include "localdpm/vec2.hpp"

namespace localdpm {

struct Bounds {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  static Bounds square(double half_width) {
    return {-half_width, half_width, -half_width, half_width};
  }
};

/// Grid node numbers. Interior nodes are 1..N on each axis; 0 and N+1 form
/// the homogeneous Dirichlet ring of the auxiliary rectangle.
struct Node {
  int ix = 0;
  int iy = 0;
  friend bool operator==(Node, Node) = default;
};

/// A grid cell, named by its lower-left node.
struct Cell {
  int ix = 0;
  int iy = 0;
  friend bool operator==(Cell, Cell) = default;
};

/// Uniform square-cell grid over the auxiliary rectangle D. Interior node
/// values are stored row-major with x fastest (see flat()).
class AuxGrid {
 public:
  AuxGrid() = default;
  AuxGrid(Bounds bounds, int n)
      : bounds_(bounds), n_(n), h_((bounds.x1 - bounds.x0) / (n + 1)) {}

  const Bounds& bounds() const { return bounds_; }
  int n() const { return n_; }
  double h() const { return h_; }
  int interior_count() const { return n_ * n_; }

  double x(int ix) const { return bounds_.x0 + ix * h_; }
  double y(int iy) const { return bounds_.y0 + iy * h_; }
  Vec2 position(Node p) const { return {x(p.ix), y(p.iy)}; }

  bool is_interior(Node p) const {
    return p.ix >= 1 && p.ix <= n_ && p.iy >= 1 && p.iy <= n_;
  }
  int flat(Node p) const { return (p.iy - 1) * n_ + (p.ix - 1); }
  Node node(int flat) const { return {flat % n_ + 1, flat / n_ + 1}; }

 private:
  Bounds bounds_{};
  int n_ = 0;
  double h_ = 0.0;
};

/// Validates the bounds (square, positive extent) and N >= 1.
AuxGrid build_grid(const Bounds& bounds, int n);

}  // namespace localdpm

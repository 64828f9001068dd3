#pragma once

#include "localdpm/aux_grid.hpp"
#include "localdpm/vec2.hpp"

namespace localdpm {

/// Local Lagrange basis in 1D, centered at 0 with spacing h. Degree 1 is the
/// tent on (-h, h); degree 3 the piecewise cubic on (-2h, 2h). Pieces are
/// left-open and right-closed.
double phi(int degree, double xi, double h);

/// Derivatives refuse evaluation within 1e-10*h of any breakpoint m*h inside
/// the support (breakpoint error); the caller nudges.
double dphi(int degree, double xi, double h);
double d2phi(int degree, double xi, double h);

/// Support half-width in units of h.
inline int support_radius(int degree) { return degree == 1 ? 1 : 2; }

/// Tensor product phi_j(x) phi_k(y) attached to a grid node.
struct TensorBasisNode {
  Node node;
  int degree = 1;
};

double tensor_value(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p);
Vec2 tensor_grad(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p);
double tensor_laplacian(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p);

}  // namespace localdpm

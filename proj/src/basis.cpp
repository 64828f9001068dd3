#include "localdpm/basis.hpp"

#include <cmath>
#include <sstream>

#include "localdpm/error.hpp"

namespace localdpm {

namespace {

void check_degree(int degree) {
  require(degree == 1 || degree == 3, ErrorCode::InvalidParameter,
          "basis degree must be 1 or 3");
}

// Index of the piece containing xi: 0..2R-1 from left to right, or -1 outside.
int piece(int degree, double xi, double h) {
  const int r = support_radius(degree);
  if (!(xi > -r * h) || xi > r * h) return -1;
  for (int m = -r + 1; m <= r; ++m)
    if (xi <= m * h) return m + r - 1;
  return -1;
}

void refuse_breakpoint(int degree, double xi, double h) {
  const int r = support_radius(degree);
  for (int m = -r; m <= r; ++m) {
    if (std::abs(xi - m * h) <= 1e-10 * h) {
      std::ostringstream msg;
      msg << "derivative of the degree-" << degree << " basis requested at breakpoint "
          << m << "h";
      fail(ErrorCode::Breakpoint, msg.str());
    }
  }
}

// Cubic pieces as scale * (u-a)(u-b)(u-c) in u = xi/h.
struct Cubic {
  double scale, a, b, c;
};
constexpr Cubic kCubic[4] = {{1.0 / 6.0, -3.0, -2.0, -1.0},
                             {-0.5, -2.0, -1.0, 1.0},
                             {0.5, -1.0, 1.0, 2.0},
                             {-1.0 / 6.0, 1.0, 2.0, 3.0}};

}  // namespace

double phi(int degree, double xi, double h) {
  check_degree(degree);
  const int p = piece(degree, xi, h);
  if (p < 0) return 0.0;
  if (degree == 1) return p == 0 ? (xi + h) / h : (xi - h) / (-h);
  const Cubic& q = kCubic[p];
  const double u = xi / h;
  return q.scale * (u - q.a) * (u - q.b) * (u - q.c);
}

double dphi(int degree, double xi, double h) {
  check_degree(degree);
  refuse_breakpoint(degree, xi, h);
  const int p = piece(degree, xi, h);
  if (p < 0) return 0.0;
  if (degree == 1) return p == 0 ? 1.0 / h : -1.0 / h;
  const Cubic& q = kCubic[p];
  const double u = xi / h;
  const double d = (u - q.b) * (u - q.c) + (u - q.a) * (u - q.c) + (u - q.a) * (u - q.b);
  return q.scale * d / h;
}

double d2phi(int degree, double xi, double h) {
  check_degree(degree);
  refuse_breakpoint(degree, xi, h);
  const int p = piece(degree, xi, h);
  if (p < 0) return 0.0;
  if (degree == 1) return 0.0;
  const Cubic& q = kCubic[p];
  const double u = xi / h;
  return q.scale * 2.0 * (3.0 * u - q.a - q.b - q.c) / (h * h);
}

double tensor_value(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p) {
  const double h = grid.h();
  return phi(b.degree, p.x - grid.x(b.node.ix), h) * phi(b.degree, p.y - grid.y(b.node.iy), h);
}

Vec2 tensor_grad(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p) {
  const double h = grid.h();
  const double sx = p.x - grid.x(b.node.ix);
  const double sy = p.y - grid.y(b.node.iy);
  return {dphi(b.degree, sx, h) * phi(b.degree, sy, h),
          phi(b.degree, sx, h) * dphi(b.degree, sy, h)};
}

double tensor_laplacian(const AuxGrid& grid, const TensorBasisNode& b, Vec2 p) {
  const double h = grid.h();
  const double sx = p.x - grid.x(b.node.ix);
  const double sy = p.y - grid.y(b.node.iy);
  return d2phi(b.degree, sx, h) * phi(b.degree, sy, h) +
         phi(b.degree, sx, h) * d2phi(b.degree, sy, h);
}

}  // namespace localdpm

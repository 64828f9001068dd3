#pragma once

#include <functional>
#include <vector>

#include "localdpm/order.hpp"

namespace localdpm {

/// u'' - sigma u = f on (a, b) with Dirichlet data taken from `exact`,
/// embedded in [a - margin, b + margin] with n interior nodes.
struct Problem1D {
  double a = 0.0;
  double b = 1.0;
  double margin = 0.5;
  int n = 32;
  Order order = Order::O2;
  double sigma = 0.0;
  std::function<double(double)> f;
  std::function<double(double)> exact;
};

struct Solution1D {
  double h = 0.0;
  std::vector<double> gamma_x;   // positions of the gamma nodes
  std::vector<double> density;   // u_gamma
  double density_error = 0.0;    // max |u_gamma - u(x_gamma)|
  double solution_error = 0.0;   // max over M+ of |u_h - u|
};

Solution1D solve_1d(const Problem1D& problem);

}  // namespace localdpm

#pragma once

namespace localdpm {

enum class Order { O2 = 2, O4 = 4 };

/// n: half-width of the centered stencil.
constexpr int stencil_radius(Order order) { return order == Order::O2 ? 1 : 2; }
/// Degree of the local Lagrange basis paired with the scheme.
constexpr int basis_degree(Order order) { return order == Order::O2 ? 1 : 3; }

/// 2 -> O2, 4 -> O4, anything else throws invalid-parameter.
Order order_from_int(int order);

}  // namespace localdpm

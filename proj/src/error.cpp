#include "localdpm/error.hpp"

#include "localdpm/order.hpp"

namespace localdpm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::GeometryResolution: return "geometry-resolution";
    case ErrorCode::DegenerateNormal: return "degenerate-normal";
    case ErrorCode::DomainMargin: return "domain-margin";
    case ErrorCode::EmptyInterior: return "empty-interior";
    case ErrorCode::Pairing: return "pairing";
    case ErrorCode::Breakpoint: return "breakpoint";
    case ErrorCode::StencilRange: return "stencil-range";
    case ErrorCode::ExtrapolationStencil: return "extrapolation-stencil";
    case ErrorCode::Completeness: return "completeness";
    case ErrorCode::AssemblyInvariant: return "assembly-invariant";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Order order_from_int(int order) {
  if (order == 2) return Order::O2;
  if (order == 4) return Order::O4;
  fail(ErrorCode::InvalidParameter, "order must be 2 or 4, got " + std::to_string(order));
}

}  // namespace localdpm

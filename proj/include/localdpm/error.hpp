#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace localdpm {

enum class ErrorCode {
  InvalidParameter,
  GeometryResolution,
  DegenerateNormal,
  DomainMargin,
  EmptyInterior,
  Pairing,
  Breakpoint,
  StencilRange,
  ExtrapolationStencil,
  Completeness,
  AssemblyInvariant,
  SingularSystem,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `step()` is the pipeline step
/// (1-based, as in the solve driver) when the error crossed run_solve, else 0.
class DpmError : public std::runtime_error {
 public:
  DpmError(ErrorCode code, const std::string& what, int step = 0)
      : std::runtime_error(what), code_(code), step_(step) {}

  ErrorCode code() const noexcept { return code_; }
  int step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  int step_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw DpmError(code, std::string(to_string(code)) + ": " + what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace localdpm

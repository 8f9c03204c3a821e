#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dexp {

enum class ErrorCode {
  InvalidInput,
  NoConvergence,
  DegeneratePricing,
  MultipleRoots,
  NoRoot,
  DegenerateDenominator,
  Infeasible,
  DegenerateClearing,
};

std::string_view to_string(ErrorCode code);

/// Failure raised by the solvers. The code identifies the failure class so
/// callers (sweeps, the CLI) can record it per row and keep going.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dexp

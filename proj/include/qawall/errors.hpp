#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qawall {

enum class ErrorCode {
  InvalidArgument,
  UnderResolved,
  ConvergenceFailure,
  DegenerateSplit,
  LinearSolveFailure,
  ZeroNorm,
  CrossingInside,
  SpeedInfeasible,
  Discontinuity,
  NormMismatch,
  BisectionFailure,
  RationalResonance,
  WaitExceeded,
  InfeasibleLengths,
  ClosureExceeded,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a permutation orbit or a tracked-mode closure leaves the
/// range where label ordering can be computed reliably. Carries whatever
/// part of the orbit was computed before the cap was hit.
class ClosureExceeded : public Error {
 public:
  ClosureExceeded(const std::string& what, std::vector<long long> partial = {})
      : Error(ErrorCode::ClosureExceeded, what), partial_(std::move(partial)) {}

  const std::vector<long long>& partial_orbit() const noexcept { return partial_; }

 private:
  std::vector<long long> partial_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace qawall

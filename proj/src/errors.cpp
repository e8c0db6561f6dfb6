#include "qawall/errors.hpp"

namespace qawall {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::CrossingInside: return "CrossingInside";
    case ErrorCode::SpeedInfeasible: return "SpeedInfeasible";
    case ErrorCode::Discontinuity: return "Discontinuity";
    case ErrorCode::NormMismatch: return "NormMismatch";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::RationalResonance: return "RationalResonance";
    case ErrorCode::WaitExceeded: return "WaitExceeded";
    case ErrorCode::InfeasibleLengths: return "InfeasibleLengths";
    case ErrorCode::ClosureExceeded: return "ClosureExceeded";
  }
  return "Unknown";
}

}  // namespace qawall

#include "corrnet/error.hpp"

namespace corrnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStructural: return "structural";
    case ErrorCode::kIncompleteScenario: return "incomplete_scenario";
    case ErrorCode::kEnumerationTooLarge: return "enumeration_too_large";
    case ErrorCode::kVariableMismatch: return "variable_mismatch";
    case ErrorCode::kNonErgodic: return "non_ergodic";
    case ErrorCode::kPositivity: return "positivity";
    case ErrorCode::kSearchCapExceeded: return "search_cap_exceeded";
    case ErrorCode::kSearchIndeterminate: return "search_indeterminate";
    case ErrorCode::kSamplingFailure: return "sampling_failure";
    case ErrorCode::kBoundViolation: return "bound_violation";
    case ErrorCode::kInfeasiblePolicy: return "infeasible_policy";
    case ErrorCode::kSolverCapExceeded: return "solver_cap_exceeded";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace corrnet

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corrnet {

enum class ErrorCode {
  kStructural,          // unknown id, dangling endpoint, malformed file
  kIncompleteScenario,  // scenario does not assign every variable
  kEnumerationTooLarge,
  kVariableMismatch,    // network and MRF disagree on the stochastic edge set
  kNonErgodic,          // Gibbs conditional with both settings at zero density
  kPositivity,          // zero potential entry where Gibbs needs strict positivity
  kSearchCapExceeded,
  kSearchIndeterminate,  // parity search hit its node/time limit
  kSamplingFailure,      // XOR retries exhausted
  kBoundViolation,       // slice bounds do not sandwich the density
  kInfeasiblePolicy,
  kSolverCapExceeded,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace corrnet

#ifndef CSB_ERROR_H_
#define CSB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace csb {

enum class ErrorCode {
  kInvalidGraph,
  kInvalidArm,
  kCapExceeded,
  kNotObservable,
  kEmptyPolytope,
  kInfeasiblePoint,
  kNumericalFailure,
  kExchangeFailure,
  kBadPartition,
  kDenominatorZero,
  kDegenerateTuning,
  kEmptyActive,
  kBadShape,
  kBudgetExceeded,
  kExhaustedSequence,
  kInvalidConfig,
  kInsufficientData,
  kAlignmentBroken,
  kFeedbackViolation,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure in the library is reported through this type; the code
// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace csb

#endif  // CSB_ERROR_H_

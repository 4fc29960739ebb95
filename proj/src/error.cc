#include "csb/error.h"

namespace csb {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidGraph: return "InvalidGraph";
    case ErrorCode::kInvalidArm: return "InvalidArm";
    case ErrorCode::kCapExceeded: return "CapExceeded";
    case ErrorCode::kNotObservable: return "NotObservable";
    case ErrorCode::kEmptyPolytope: return "EmptyPolytope";
    case ErrorCode::kInfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kExchangeFailure: return "ExchangeFailure";
    case ErrorCode::kBadPartition: return "BadPartition";
    case ErrorCode::kDenominatorZero: return "DenominatorZero";
    case ErrorCode::kDegenerateTuning: return "DegenerateTuning";
    case ErrorCode::kEmptyActive: return "EmptyActive";
    case ErrorCode::kBadShape: return "BadShape";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kExhaustedSequence: return "ExhaustedSequence";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kAlignmentBroken: return "AlignmentBroken";
    case ErrorCode::kFeedbackViolation: return "FeedbackViolation";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace csb

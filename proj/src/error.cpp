#include "botw/error.hpp"

namespace botw {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewArms: return "TooFewArms";
    case ErrorCode::NormViolation: return "NormViolation";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::HorizonMissing: return "HorizonMissing";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::LossOutOfRange: return "LossOutOfRange";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NonPositiveRegret: return "NonPositiveRegret";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace botw

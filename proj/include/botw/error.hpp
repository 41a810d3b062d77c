#pragma once

#include <stdexcept>
#include <string>

namespace botw {

enum class ErrorCode {
  TooFewArms,
  NormViolation,
  RankDeficient,
  DimensionMismatch,
  InvalidDistribution,
  SingularMatrix,
  NonFiniteInput,
  HorizonMissing,
  HorizonExceeded,
  LossOutOfRange,
  InfeasibleBudget,
  InvalidArgument,
  InvariantViolation,
  NonPositiveRegret,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a stable code; what() is
// prefixed with the code name so command-line diagnostics can be grepped.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace botw

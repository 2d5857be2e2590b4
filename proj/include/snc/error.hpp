#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace snc {

// Every failure the engine can report. The CLI maps each value to its own
// exit status, so append new codes at the end.
enum class ErrorCode {
  ThetaOutOfDomain,
  MissingHoelderAssignment,
  InvalidHoelderValue,
  NegativeRate,
  NonPositiveParameter,
  EmptyAggregate,
  LengthMismatch,
  DuplicateName,
  UnknownVertex,
  UnknownFlow,
  UnknownId,
  EqualRatesDegenerate,
  StabilityViolated,
  NoEligibleFlow,
  NotFeedforward,
  FlowNotAtVertex,
  PathMismatch,
  InfeasiblePoint,
  NoFeasiblePoint,
  SyntaxError,
  UnknownTag,
  ArityMismatch,
  MissingTerminator,
  BadNumber,
  PriorityNotNatural,
  UnsupportedNetwork,
  InvalidConfig,
  InvalidArgument,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, int line);

  ErrorCode code() const noexcept { return code_; }
  // 1-based source line for errors raised while reading a network file.
  std::optional<int> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
};

}  // namespace snc

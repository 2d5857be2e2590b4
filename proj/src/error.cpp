#include "snc/error.hpp"

namespace snc {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ThetaOutOfDomain: return "ThetaOutOfDomain";
    case ErrorCode::MissingHoelderAssignment: return "MissingHoelderAssignment";
    case ErrorCode::InvalidHoelderValue: return "InvalidHoelderValue";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::EmptyAggregate: return "EmptyAggregate";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownFlow: return "UnknownFlow";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::EqualRatesDegenerate: return "EqualRatesDegenerate";
    case ErrorCode::StabilityViolated: return "StabilityViolated";
    case ErrorCode::NoEligibleFlow: return "NoEligibleFlow";
    case ErrorCode::NotFeedforward: return "NotFeedforward";
    case ErrorCode::FlowNotAtVertex: return "FlowNotAtVertex";
    case ErrorCode::PathMismatch: return "PathMismatch";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MissingTerminator: return "MissingTerminator";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::PriorityNotNatural: return "PriorityNotNatural";
    case ErrorCode::UnsupportedNetwork: return "UnsupportedNetwork";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      code_(code),
      line_(line) {}

}  // namespace snc

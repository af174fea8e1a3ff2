#include "logrepair/error.hpp"

namespace logrepair {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparsableTimestamp: return "UnparsableTimestamp";
    case ErrorCode::UnparsableValue: return "UnparsableValue";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::InconsistentTrace: return "InconsistentTrace";
    case ErrorCode::InvalidRatios: return "InvalidRatios";
    case ErrorCode::UnreachableEnd: return "UnreachableEnd";
    case ErrorCode::InvalidProbabilities: return "InvalidProbabilities";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NegativeDerivedValue: return "NegativeDerivedValue";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorCode::SplitLeak: return "SplitLeak";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
    case ErrorCode::InvalidFlag: return "InvalidFlag";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::NonFinite:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::IoFailure:
    case ErrorCode::EmptyEvaluationSet:
      return false;
    default:
      return true;
  }
}

}  // namespace logrepair

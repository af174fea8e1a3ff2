#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logrepair {

enum class ErrorCode {
  MissingColumn,
  UnparsableTimestamp,
  UnparsableValue,
  MalformedCsv,
  EmptyLog,
  InconsistentTrace,
  InvalidRatios,
  UnreachableEnd,
  InvalidProbabilities,
  InvalidSpec,
  NegativeDerivedValue,
  LengthMismatch,
  SchemaMismatch,
  ShapeMismatch,
  IndexOutOfRange,
  NonFinite,
  NonFiniteLoss,
  EmptyEvaluationSet,
  SplitLeak,
  InvalidConfig,
  UnknownSubcommand,
  InvalidFlag,
  IoFailure,
  FormatError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Errors the library raises. The code identifies the failure class; the
/// message carries the offending name, row, or shape.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Whether the error stems from bad user input rather than a failure while
  /// running (used by the CLI to pick its exit status).
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
};

}  // namespace logrepair

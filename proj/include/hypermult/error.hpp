#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypermult {

enum class ErrorCode {
  // datasets
  MissingValue,
  NotBinaryTarget,
  EmptyFile,
  DegenerateSplit,
  InvalidDataset,
  // spaces
  UnknownModel,
  UnknownParam,
  SameParam,
  // learners
  InvalidConfig,
  DimensionMismatch,
  // metrics
  LengthMismatch,
  Empty,
  NoComparableEntry,
  NotMarginal,
  NotPairwise,
  SchemaError,
  NoDefaultRow,
  DuplicateDefault,
  LabelDomainError,
  // reports
  NonFinite,
  EmptyRegion,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the Python binding) can dispatch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace hypermult

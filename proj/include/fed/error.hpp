#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fed {

enum class ErrorCode {
  // math / shape
  DimensionMismatch,
  ZeroNormVector,
  InvalidVector,
  // aggregation
  EmptyInput,
  LengthMismatch,
  AllZeroWeights,
  InvalidWeight,
  MissingWeight,
  DuplicatePage,
  MixedDocuments,
  // classifier
  NoClasses,
  DuplicateLabel,
  // index
  TooFewVectors,
  BadNlist,
  NotTrained,
  DuplicateId,
  BadNprobe,
  BadK,
  // ingestion
  ProviderUnavailable,
  ProviderBadResponse,
  ContentRejected,
  InvalidManifest,
  // store
  IoError,
  InconsistentDim,
  BadMagic,
  CrcMismatch,
  TruncatedFile,
  BadLabelRef,
  UnsupportedVersion,
  // eval
  InvalidSplit,
  ClassTooSmall,
  EmptyMatrix,
  TooFewClasses,
  // cli
  InvalidArgument,
  Internal,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { Io, Provider, Validation, Internal };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

/// Exit status for a category: I/O=2, provider=3, validation=4, internal=5.
int exit_code(ErrorCategory cat) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fed

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swsr {

enum class ErrorKind {
  kDuplicateWord,
  kInconsistentDimension,
  kParseFailure,
  kEmptyInput,
  kZeroVector,
  kShapeMismatch,
  kIoFailure,
  kDivergenceDetected,
  kConfigError,
  kNoIntruderAvailable,
  kMetricUndefined,
  kUnknownDocument,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind tells callers (the CLI in particular) how to classify it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace swsr

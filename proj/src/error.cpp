#include "swsr/error.hpp"

namespace swsr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDuplicateWord: return "DuplicateWord";
    case ErrorKind::kInconsistentDimension: return "InconsistentDimension";
    case ErrorKind::kParseFailure: return "ParseFailure";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kZeroVector: return "ZeroVector";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kIoFailure: return "IoFailure";
    case ErrorKind::kDivergenceDetected: return "DivergenceDetected";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kNoIntruderAvailable: return "NoIntruderAvailable";
    case ErrorKind::kMetricUndefined: return "MetricUndefined";
    case ErrorKind::kUnknownDocument: return "UnknownDocument";
  }
  return "Unknown";
}

}  // namespace swsr

#include "mga/error.hpp"

namespace mga {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::OversizeForRiff: return "OversizeForRiff";
    case ErrorCode::MalformedChunk: return "MalformedChunk";
    case ErrorCode::DescriptionTooLong: return "DescriptionTooLong";
    case ErrorCode::FieldTooLong: return "FieldTooLong";
    case ErrorCode::NonAsciiText: return "NonAsciiText";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::MalformedTimecode: return "MalformedTimecode";
    case ErrorCode::MissingFrameRate: return "MissingFrameRate";
    case ErrorCode::NegativeResult: return "NegativeResult";
    case ErrorCode::FrameRateMismatch: return "FrameRateMismatch";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MalformedMarkerLine: return "MalformedMarkerLine";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::ForeignAxml: return "ForeignAxml";
    case ErrorCode::NonMonotonicMarkers: return "NonMonotonicMarkers";
    case ErrorCode::EmptySpec: return "EmptySpec";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::TargetTooShort: return "TargetTooShort";
    case ErrorCode::EmptyProject: return "EmptyProject";
    case ErrorCode::StaleSelection: return "StaleSelection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingAudio: return "MissingAudio";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
  }
  return "Unknown";
}

}  // namespace mga

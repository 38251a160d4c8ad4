#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mga {

enum class ErrorCode {
  // container
  MalformedContainer,
  UnsupportedEncoding,
  OversizeForRiff,
  MalformedChunk,
  DescriptionTooLong,
  FieldTooLong,
  NonAsciiText,
  InvalidUtf8,
  // timecode
  MalformedTimecode,
  MissingFrameRate,
  NegativeResult,
  FrameRateMismatch,
  UnsupportedFormat,
  EmptyFile,
  MalformedMarkerLine,
  // metamodel
  ValidationFailed,
  SchemaViolation,
  MalformedXml,
  ForeignAxml,
  NonMonotonicMarkers,
  // quality
  EmptySpec,
  InvalidSpec,
  EmptyCollection,
  // assembly
  TargetTooShort,
  EmptyProject,
  StaleSelection,
  InvalidArgument,
  // renderer
  MissingAudio,
  RateMismatch,
  RangeOutOfBounds,
};

/// Stable identifier used in diagnostics and JSON error bodies.
std::string_view to_string(ErrorCode code) noexcept;

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mga

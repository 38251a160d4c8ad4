#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mga/byte_io.hpp"

namespace mga {

/// Position measured in milliseconds from content start.
struct ContentTime {
  std::uint64_t ms = 0;

  auto operator<=>(const ContentTime&) const = default;
};

inline ContentTime operator+(ContentTime a, ContentTime b) { return {a.ms + b.ms}; }

}  // namespace mga

namespace mga::timecode {

/// Frame rate applied by callers that opt into a default for four-segment
/// timecodes (European broadcast).
inline constexpr unsigned kDefaultFrameRate = 25;

struct Timecode {
  unsigned hours = 0;
  unsigned minutes = 0;
  unsigned seconds = 0;
  std::optional<unsigned> frames;
  std::optional<unsigned> frame_rate;

  bool operator==(const Timecode&) const = default;
};

/// Accepts H:MM:SS, HH:MM:SS and HH:MM:SS:FF with surrounding whitespace.
/// Four-segment input needs `frame_rate`, otherwise MissingFrameRate.
Timecode parse_timecode(std::string_view text, std::optional<unsigned> frame_rate = std::nullopt);

/// Milliseconds since 00:00:00; frames count round-half-up to whole ms.
std::uint64_t absolute_ms(const Timecode& tc);

/// Position of `tc` relative to `reference`.
ContentTime normalize(const Timecode& tc, const Timecode& reference);

std::string format(const Timecode& tc);

// Marker files

enum class MarkerFormat { csv, tsv, txt };

struct RawMarker {
  std::string label;
  std::string timecode_text;
  std::size_t line_number = 0;

  bool operator==(const RawMarker&) const = default;
};

/// Reads DAW marker exports. CSV/TSV: label, timecode (a header row is
/// skipped when its second cell is not a timecode). TXT: timecode first,
/// the rest of the line is the label.
std::vector<RawMarker> ingest_marker_file(ByteView bytes,
                                          std::optional<MarkerFormat> format_hint = std::nullopt,
                                          std::optional<unsigned> frame_rate = std::nullopt);

std::optional<MarkerFormat> marker_format_from_name(std::string_view name);

}  // namespace mga::timecode

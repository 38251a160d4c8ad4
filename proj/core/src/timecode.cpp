#include <algorithm>
#include <cctype>
#include <cstdio>

#include "mga/error.hpp"
#include "mga/timecode.hpp"

namespace mga::timecode {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::MalformedTimecode, "timecode '" + std::string(text) + "': " + why);
}

unsigned digits(std::string_view text, std::string_view field, std::size_t min_len,
                std::size_t max_len) {
  if (field.size() < min_len || field.size() > max_len ||
      !std::all_of(field.begin(), field.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    malformed(text, "segment '" + std::string(field) + "' is not a " +
                        std::to_string(min_len) + "-" + std::to_string(max_len) +
                        " digit number");
  unsigned v = 0;
  for (char c : field) v = v * 10 + static_cast<unsigned>(c - '0');
  return v;
}

}  // namespace

Timecode parse_timecode(std::string_view text, std::optional<unsigned> frame_rate) {
  const std::string_view body = trim(text);
  if (body.empty()) malformed(text, "empty");

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = body.find(':', start);
    parts.push_back(trim(body.substr(start, colon - start)));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3 && parts.size() != 4)
    malformed(text, "expected 3 or 4 colon-separated segments, got " +
                        std::to_string(parts.size()));

  Timecode tc;
  tc.hours = digits(text, parts[0], 1, 2);
  tc.minutes = digits(text, parts[1], 2, 2);
  tc.seconds = digits(text, parts[2], 2, 2);
  if (tc.minutes >= 60) malformed(text, "minutes out of range");
  if (tc.seconds >= 60) malformed(text, "seconds out of range");

  if (parts.size() == 4) {
    const unsigned frames = digits(text, parts[3], 1, 3);
    if (!frame_rate)
      throw Error(ErrorCode::MissingFrameRate,
                  "timecode '" + std::string(text) + "' has a frame field but no frame rate is known");
    if (*frame_rate == 0) malformed(text, "frame rate must be positive");
    if (frames >= *frame_rate)
      malformed(text, "frame " + std::to_string(frames) + " not below rate " +
                          std::to_string(*frame_rate));
    tc.frames = frames;
    tc.frame_rate = *frame_rate;
  }
  return tc;
}

std::uint64_t absolute_ms(const Timecode& tc) {
  std::uint64_t ms = (std::uint64_t{tc.hours} * 3600 + tc.minutes * 60u + tc.seconds) * 1000;
  if (tc.frames) {
    const std::uint64_t rate = tc.frame_rate.value_or(0);
    if (rate == 0) throw Error(ErrorCode::MissingFrameRate, "timecode frames without a frame rate");
    ms += (2 * std::uint64_t{*tc.frames} * 1000 + rate) / (2 * rate);
  }
  return ms;
}

ContentTime normalize(const Timecode& tc, const Timecode& reference) {
  if (tc.frames && reference.frames && tc.frame_rate != reference.frame_rate) {
    throw Error(ErrorCode::FrameRateMismatch,
                "timecode at " + std::to_string(tc.frame_rate.value_or(0)) +
                    " fps against reference at " +
                    std::to_string(reference.frame_rate.value_or(0)) + " fps");
  }
  const std::uint64_t at = absolute_ms(tc);
  const std::uint64_t ref = absolute_ms(reference);
  if (at < ref)
    throw Error(ErrorCode::NegativeResult,
                "timecode " + format(tc) + " precedes reference " + format(reference));
  return ContentTime{at - ref};
}

std::string format(const Timecode& tc) {
  char buf[32];
  if (tc.frames) {
    std::snprintf(buf, sizeof buf, "%02u:%02u:%02u:%02u", tc.hours, tc.minutes, tc.seconds,
                  *tc.frames);
  } else {
    std::snprintf(buf, sizeof buf, "%02u:%02u:%02u", tc.hours, tc.minutes, tc.seconds);
  }
  return buf;
}

}  // namespace mga::timecode

#pragma once

// Three-tier segment metadata: a programme, its tracks, and the segments
// (clips) cut from those tracks. Segments are kept in one flat list and
// point at their track by id.

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mga/container.hpp"
#include "mga/error.hpp"
#include "mga/timecode.hpp"
#include "mga/xml.hpp"

namespace mga::meta {

using UtcInstant = std::chrono::sys_seconds;

/// "2024-05-01T12:30:00Z"
std::string format_instant(UtcInstant t);
std::optional<UtcInstant> parse_instant(std::string_view text);

enum class Category { descriptive, administrative, structural };
enum class TrackKind { dialogue, music, ambience, effects, other };

std::string_view to_string(Category c) noexcept;
std::string_view to_string(TrackKind k) noexcept;
std::optional<Category> category_from_string(std::string_view s) noexcept;
std::optional<TrackKind> track_kind_from_string(std::string_view s) noexcept;

/// Foreign-namespace attributes and elements carried through untouched.
struct Extensions {
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<xml::Element> elements;

  bool empty() const noexcept { return attributes.empty() && elements.empty(); }
  bool operator==(const Extensions&) const = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool valid() const noexcept;
  bool operator==(const GeoPoint&) const = default;
};

struct Programme {
  std::string id;
  std::string title;
  std::optional<std::string> description;
  std::optional<std::string> language;
  std::map<std::string, std::string> formal;       // author, composer, producer, ...
  std::map<std::string, Category> categories;      // keyed like `formal`
  Extensions extensions;

  bool operator==(const Programme&) const = default;
};

struct Track {
  std::string id;
  int index = 0;
  TrackKind kind = TrackKind::other;
  std::optional<std::string> language;
  std::optional<std::string> audio_ref;
  Extensions extensions;

  bool operator==(const Track&) const = default;
};

struct Segment {
  std::string id;
  std::string track_ref;
  ContentTime start;
  ContentTime duration;
  std::string label;
  int loi = 1;  // 1 = most important
  std::set<std::string> topics;
  std::optional<GeoPoint> location;
  std::optional<UtcInstant> timestamp;
  Extensions extensions;

  ContentTime end() const { return start + duration; }
  bool operator==(const Segment&) const = default;
};

struct Project {
  Programme programme;
  std::vector<Track> tracks;
  std::vector<Segment> segments;
  Extensions extensions;  // on the root element, incl. xmlns:* declarations

  const Track* find_track(std::string_view id) const;
  const Segment* find_segment(std::string_view id) const;
  Segment* find_segment(std::string_view id);
  bool operator==(const Project&) const = default;
};

struct ValidationFinding {
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const ValidationFinding&) const = default;
};

/// Carries every finding, not just the first.
class ValidationError : public Error {
 public:
  ValidationError(ErrorCode code, std::vector<ValidationFinding> findings);
  const std::vector<ValidationFinding>& findings() const noexcept { return findings_; }

 private:
  std::vector<ValidationFinding> findings_;
};

/// Checks all Project invariants. Order: programme, tracks, segments in
/// list order, then overlaps per track in start order.
std::vector<ValidationFinding> validate(const Project& project);

/// Throws ValidationError(ValidationFailed) when validate() is non-empty.
Project build_project(Programme programme, std::vector<Track> tracks,
                      std::vector<Segment> segments);

// XML vocabulary "mgaProject v1"

inline constexpr std::string_view kNamespace = "urn:mga:project:1";
inline constexpr std::string_view kRootElement = "mgaProject";

std::string to_xml(const Project& project);

struct DecodeResult {
  Project project;
  // Attribute-level schema problems; offending values are left at
  // sentinel defaults (loi 0, duration 0, ...).
  std::vector<ValidationFinding> findings;
};

/// Lenient reader. Still throws MalformedXml for broken XML and
/// SchemaViolation for a wrong root or a missing <programme>.
DecodeResult decode_xml(std::string_view text);

/// Strict reader: SchemaViolation on any schema finding, then
/// ValidationFailed on Project invariant violations.
Project from_xml(std::string_view text);

/// True when the XML text's root element is <mgaProject>.
bool is_project_xml(std::string_view text);

struct EmbedOptions {
  // Overwrite an axml chunk that holds some other vocabulary.
  bool replace_foreign = false;
};

container::ContainerFile embed(const Project& project, container::ContainerFile file,
                               const EmbedOptions& options = {});

/// Absent when there is no axml chunk, or (non-strict) when it holds a
/// different vocabulary.
std::optional<Project> extract(const container::ContainerFile& file, bool strict = true);

/// Turns DAW markers into a gap-free run of segments on one track. A label
/// ending in "#L<n>" sets the segment's LOI and the suffix is dropped.
std::vector<Segment> segments_from_markers(const std::vector<timecode::RawMarker>& markers,
                                           const std::string& track_ref,
                                           const timecode::Timecode& reference,
                                           std::optional<unsigned> frame_rate,
                                           ContentTime total_duration, int default_loi);

}  // namespace mga::meta

#pragma once

// Variable-length and location-filtered programmes built from segment
// metadata.
//
// LOI 1 is the most important level (the lead of an inverted pyramid).
// Shortening a programme drops whole levels from the bottom; within the
// level that straddles the target, segments are kept in document order up
// to the first one that no longer fits.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mga/metamodel.hpp"

namespace mga::assembly {

using meta::GeoPoint;

struct Selection {
  std::vector<std::string> included;  // playback order
  int boundary_loi = 0;               // 0 when nothing is included
  ContentTime total_duration;
  ContentTime target;
  bool overflow = false;  // mandatory level kept despite exceeding target

  bool operator==(const Selection&) const = default;
};

/// Greedy walk in (loi, start, id) order; stops at the first segment that
/// would exceed `target`. TargetTooShort when the LOI-1 segments alone do
/// not fit, unless `allow_overflow`, which keeps exactly that level.
Selection select_by_loi(const meta::Project& project, ContentTime target, bool allow_overflow);

/// Project restricted to the selected segments, in their original order.
meta::Project slice(const meta::Project& project, const Selection& selection);

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

struct RegionalFilter {
  GeoPoint center;
  double max_km = 0.0;  // may be +inf
  std::chrono::seconds max_age{0};  // seconds::max() disables the age limit
  meta::UtcInstant now;
  bool keep_unlocated = false;
};

meta::Project filter_regional(const meta::Project& project, const RegionalFilter& filter);

struct EdlEntry {
  std::string segment_id;
  std::string track_ref;
  ContentTime source_start;
  ContentTime duration;

  bool operator==(const EdlEntry&) const = default;
};

struct Edl {
  std::vector<EdlEntry> entries;
  std::uint32_t crossfade_ms = 0;

  bool operator==(const Edl&) const = default;
};

Edl to_edl(const Selection& selection, const meta::Project& project, std::uint32_t crossfade_ms);

nlohmann::json to_json(const Selection& selection);
nlohmann::json to_json(const Edl& edl);
Edl edl_from_json(const nlohmann::json& j);

}  // namespace mga::assembly

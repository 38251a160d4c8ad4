#include "mga/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mga::assembly {

Selection select_by_loi(const meta::Project& project, ContentTime target, bool allow_overflow) {
  if (project.segments.empty()) throw Error(ErrorCode::EmptyProject, "project has no segments");

  std::vector<const meta::Segment*> order;
  for (const auto& s : project.segments) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const meta::Segment* a, const meta::Segment* b) {
    if (a->loi != b->loi) return a->loi < b->loi;
    if (a->start != b->start) return a->start < b->start;
    return a->id < b->id;
  });

  std::uint64_t mandatory = 0;
  for (const auto* s : order)
    if (s->loi == 1) mandatory += s->duration.ms;

  Selection sel;
  sel.target = target;
  std::vector<const meta::Segment*> chosen;
  if (target.ms == 0 || mandatory > target.ms) {
    if (!allow_overflow)
      throw Error(ErrorCode::TargetTooShort,
                  "target " + std::to_string(target.ms) + " ms is shorter than the " +
                      std::to_string(mandatory) + " ms of LOI-1 content");
    for (const auto* s : order)
      if (s->loi == 1) chosen.push_back(s);
    sel.overflow = true;
  } else {
    std::uint64_t total = 0;
    for (const auto* s : order) {
      if (total + s->duration.ms > target.ms) break;
      total += s->duration.ms;
      chosen.push_back(s);
    }
  }

  auto track_index = [&](const meta::Segment* s) {
    const auto* t = project.find_track(s->track_ref);
    return t ? t->index : -1;
  };
  std::sort(chosen.begin(), chosen.end(), [&](const meta::Segment* a, const meta::Segment* b) {
    if (a->start != b->start) return a->start < b->start;
    if (track_index(a) != track_index(b)) return track_index(a) < track_index(b);
    return a->id < b->id;
  });
  for (const auto* s : chosen) {
    sel.included.push_back(s->id);
    sel.total_duration.ms += s->duration.ms;
    sel.boundary_loi = std::max(sel.boundary_loi, s->loi);
  }
  return sel;
}

meta::Project slice(const meta::Project& project, const Selection& selection) {
  const std::set<std::string> keep(selection.included.begin(), selection.included.end());
  meta::Project out = project;
  out.segments.clear();
  for (const auto& s : project.segments)
    if (keep.count(s.id)) out.segments.push_back(s);
  return out;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double phi1 = a.lat * rad;
  const double phi2 = b.lat * rad;
  const double dphi = (b.lat - a.lat) * rad;
  const double dlambda = (b.lon - a.lon) * rad;
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

meta::Project filter_regional(const meta::Project& project, const RegionalFilter& filter) {
  if (!filter.center.valid()) throw Error(ErrorCode::InvalidArgument, "center outside lat/lon range");
  if (!(filter.max_km >= 0.0)) throw Error(ErrorCode::InvalidArgument, "max_km must be >= 0");
  if (filter.max_age.count() < 0) throw Error(ErrorCode::InvalidArgument, "max_age must be >= 0");

  meta::Project out = project;
  out.segments.clear();
  for (const auto& s : project.segments) {
    if ((!s.location || !s.timestamp) && !filter.keep_unlocated) continue;
    if (s.location && haversine_km(*s.location, filter.center) > filter.max_km) continue;
    if (s.timestamp && filter.now - *s.timestamp > filter.max_age) continue;
    out.segments.push_back(s);
  }
  return out;
}

Edl to_edl(const Selection& selection, const meta::Project& project, std::uint32_t crossfade_ms) {
  Edl edl;
  edl.crossfade_ms = crossfade_ms;
  for (const auto& id : selection.included) {
    const auto* s = project.find_segment(id);
    if (!s) throw Error(ErrorCode::StaleSelection, "segment '" + id + "' is no longer in the project");
    edl.entries.push_back({s->id, s->track_ref, s->start, s->duration});
  }
  return edl;
}

nlohmann::json to_json(const Selection& sel) {
  return {{"included", sel.included},
          {"boundary_loi", sel.boundary_loi},
          {"total_duration_ms", sel.total_duration.ms},
          {"target_ms", sel.target.ms},
          {"overflow", sel.overflow}};
}

nlohmann::json to_json(const Edl& edl) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : edl.entries) {
    entries.push_back({{"segment_id", e.segment_id},
                       {"track_ref", e.track_ref},
                       {"source_start_ms", e.source_start.ms},
                       {"duration_ms", e.duration.ms}});
  }
  return {{"crossfade_ms", edl.crossfade_ms}, {"entries", entries}};
}

Edl edl_from_json(const nlohmann::json& j) {
  try {
    Edl edl;
    edl.crossfade_ms = j.value("crossfade_ms", 0u);
    for (const auto& e : j.at("entries")) {
      edl.entries.push_back({e.at("segment_id").get<std::string>(),
                             e.at("track_ref").get<std::string>(),
                             ContentTime{e.at("source_start_ms").get<std::uint64_t>()},
                             ContentTime{e.at("duration_ms").get<std::uint64_t>()}});
    }
    return edl;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("EDL JSON: ") + e.what());
  }
}

}  // namespace mga::assembly

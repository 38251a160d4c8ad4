#include "mga/metamodel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <regex>

#include "project_xml_internal.hpp"

namespace mga::meta {

namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_formal_key(std::string_view key) {
  if (key.empty() || !(key[0] >= 'a' && key[0] <= 'z')) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

bool is_language_tag(std::string_view tag) {
  static const std::regex re("[A-Za-z]{2,8}(-[A-Za-z0-9]{1,8})*");
  return std::regex_match(tag.begin(), tag.end(), re);
}

std::string segment_path(const Segment& s) { return "/mgaProject/segment[@id='" + s.id + "']"; }
std::string track_path(const Track& t) { return "/mgaProject/track[@id='" + t.id + "']"; }

}  // namespace

std::string format_instant(UtcInstant t) {
  const std::int64_t secs = t.time_since_epoch().count();
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60));
  return buf;
}

std::optional<UtcInstant> parse_instant(std::string_view text) {
  static const std::regex re(R"((\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})Z)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, re)) return std::nullopt;
  auto num = [&](int i) { return std::stoll(m[i].str()); };
  const std::int64_t y = num(1);
  const unsigned mo = static_cast<unsigned>(num(2));
  const unsigned d = static_cast<unsigned>(num(3));
  const std::int64_t h = num(4), mi = num(5), s = num(6);
  if (mo < 1 || mo > 12 || d < 1 || h > 23 || mi > 59 || s > 59) return std::nullopt;
  static constexpr unsigned kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (d > kDays[mo - 1] || (mo == 2 && d == 29 && !leap)) return std::nullopt;
  const std::int64_t secs = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
  return UtcInstant{std::chrono::seconds{secs}};
}

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::descriptive: return "descriptive";
    case Category::administrative: return "administrative";
    case Category::structural: return "structural";
  }
  return "descriptive";
}

std::string_view to_string(TrackKind k) noexcept {
  switch (k) {
    case TrackKind::dialogue: return "dialogue";
    case TrackKind::music: return "music";
    case TrackKind::ambience: return "ambience";
    case TrackKind::effects: return "effects";
    case TrackKind::other: return "other";
  }
  return "other";
}

std::optional<Category> category_from_string(std::string_view s) noexcept {
  for (auto c : {Category::descriptive, Category::administrative, Category::structural})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<TrackKind> track_kind_from_string(std::string_view s) noexcept {
  for (auto k : {TrackKind::dialogue, TrackKind::music, TrackKind::ambience, TrackKind::effects,
                 TrackKind::other})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

bool GeoPoint::valid() const noexcept {
  return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

const Track* Project::find_track(std::string_view id) const {
  auto it = std::find_if(tracks.begin(), tracks.end(), [&](const Track& t) { return t.id == id; });
  return it == tracks.end() ? nullptr : &*it;
}

const Segment* Project::find_segment(std::string_view id) const {
  auto it = std::find_if(segments.begin(), segments.end(),
                         [&](const Segment& s) { return s.id == id; });
  return it == segments.end() ? nullptr : &*it;
}

Segment* Project::find_segment(std::string_view id) {
  auto it = std::find_if(segments.begin(), segments.end(),
                         [&](const Segment& s) { return s.id == id; });
  return it == segments.end() ? nullptr : &*it;
}

namespace {

std::string summarize(const std::vector<ValidationFinding>& findings) {
  std::string msg = std::to_string(findings.size()) + " finding(s)";
  if (!findings.empty()) {
    msg += ": " + findings.front().code + " at " + findings.front().path + ": " +
           findings.front().message;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(ErrorCode code, std::vector<ValidationFinding> findings)
    : Error(code, summarize(findings)), findings_(std::move(findings)) {}

std::vector<ValidationFinding> validate(const Project& project) {
  std::vector<ValidationFinding> out;
  auto add = [&](std::string code, std::string path, std::string message) {
    out.push_back({std::move(code), std::move(path), std::move(message)});
  };

  const Programme& prog = project.programme;
  if (prog.id.empty()) add("EMPTY_ID", "/mgaProject/programme/@id", "programme id is empty");
  if (prog.language && !is_language_tag(*prog.language))
    add("BAD_LANGUAGE", "/mgaProject/programme/@language",
        "'" + *prog.language + "' is not a language tag");
  for (const auto& [key, value] : prog.formal) {
    if (!is_formal_key(key))
      add("BAD_FORMAL_KEY", "/mgaProject/programme/formal[@key='" + key + "']",
          "formal keys must be lowercase ASCII identifiers");
  }
  for (const auto& [key, category] : prog.categories) {
    if (!prog.formal.count(key))
      add("BAD_CATEGORY_KEY", "/mgaProject/programme/formal[@key='" + key + "']",
          "category annotates a key that has no formal value");
  }

  std::map<std::string, int> track_ids;
  std::vector<int> index_uses(project.tracks.size(), 0);
  for (const Track& t : project.tracks) {
    if (t.id.empty()) add("EMPTY_ID", track_path(t) + "/@id", "track id is empty");
    if (++track_ids[t.id] == 2) add("DUPLICATE_ID", track_path(t), "duplicate track id '" + t.id + "'");
    if (t.index < 0 || static_cast<std::size_t>(t.index) >= project.tracks.size()) {
      add("BAD_TRACK_INDEX", track_path(t) + "/@index",
          "index " + std::to_string(t.index) + " outside 0.." +
              std::to_string(project.tracks.size() - 1));
    } else if (++index_uses[static_cast<std::size_t>(t.index)] == 2) {
      add("BAD_TRACK_INDEX", track_path(t) + "/@index",
          "index " + std::to_string(t.index) + " used twice");
    }
    if (t.language && !is_language_tag(*t.language))
      add("BAD_LANGUAGE", track_path(t) + "/@language", "'" + *t.language + "' is not a language tag");
  }

  std::map<std::string, int> segment_ids;
  for (const Segment& s : project.segments) {
    const std::string path = segment_path(s);
    if (s.id.empty()) add("EMPTY_ID", path + "/@id", "segment id is empty");
    if (++segment_ids[s.id] == 2) add("DUPLICATE_ID", path, "duplicate segment id '" + s.id + "'");
    if (!track_ids.count(s.track_ref))
      add("DANGLING_TRACK_REF", path + "/@track",
          "track '" + s.track_ref + "' does not exist");
    if (s.duration.ms == 0) add("BAD_DURATION", path + "/@duration", "duration must be positive");
    if (s.loi < 1) add("BAD_LOI", path + "/@loi", "loi must be >= 1, got " + std::to_string(s.loi));
    if (s.location && !s.location->valid())
      add("BAD_LOCATION", path + "/location", "latitude/longitude out of range");
  }

  for (const Track& t : project.tracks) {
    std::vector<const Segment*> on_track;
    for (const Segment& s : project.segments)
      if (s.track_ref == t.id) on_track.push_back(&s);
    std::stable_sort(on_track.begin(), on_track.end(), [](const Segment* a, const Segment* b) {
      return a->start != b->start ? a->start < b->start : a->id < b->id;
    });
    // `reach` is the earlier segment that extends furthest.
    const Segment* reach = on_track.empty() ? nullptr : on_track.front();
    for (std::size_t i = 1; i < on_track.size(); ++i) {
      if (on_track[i]->start < reach->end())
        add("OVERLAP", segment_path(*on_track[i]),
            "overlaps segment '" + reach->id + "' on track '" + t.id + "'");
      if (on_track[i]->end() > reach->end()) reach = on_track[i];
    }
  }
  return out;
}

Project build_project(Programme programme, std::vector<Track> tracks,
                      std::vector<Segment> segments) {
  Project p{std::move(programme), std::move(tracks), std::move(segments), {}};
  auto findings = validate(p);
  if (!findings.empty()) throw ValidationError(ErrorCode::ValidationFailed, std::move(findings));
  return p;
}

container::ContainerFile embed(const Project& project, container::ContainerFile file,
                               const EmbedOptions& options) {
  auto findings = validate(project);
  if (!findings.empty()) throw ValidationError(ErrorCode::ValidationFailed, std::move(findings));
  if (!options.replace_foreign) {
    if (auto existing = container::read_axml(file); existing && !is_project_xml(*existing))
      throw Error(ErrorCode::ForeignAxml,
                  "axml chunk holds another vocabulary; refusing to overwrite it");
  }
  return container::write_axml(std::move(file), to_xml(project));
}

std::optional<Project> extract(const container::ContainerFile& file, bool strict) {
  auto text = container::read_axml(file);
  if (!text) return std::nullopt;
  xml::Element root;
  try {
    root = xml::parse(*text);
  } catch (const Error&) {
    if (strict) throw;
    return std::nullopt;
  }
  if (xml::local_name(root.name) != kRootElement) {
    if (strict)
      throw Error(ErrorCode::ForeignAxml, "axml root element is <" + root.name + ">, not <" +
                                              std::string(kRootElement) + ">");
    return std::nullopt;
  }
  return detail::project_from_element(root);
}

std::vector<Segment> segments_from_markers(const std::vector<timecode::RawMarker>& markers,
                                           const std::string& track_ref,
                                           const timecode::Timecode& reference,
                                           std::optional<unsigned> frame_rate,
                                           ContentTime total_duration, int default_loi) {
  if (markers.empty()) throw Error(ErrorCode::InvalidArgument, "no markers to convert");
  if (default_loi < 1) throw Error(ErrorCode::InvalidArgument, "default loi must be >= 1");

  static const std::regex loi_suffix(R"(^(.*?)\s*#L(\d+)\s*$)");
  std::vector<ContentTime> starts;
  for (const auto& m : markers) {
    const auto tc = timecode::parse_timecode(m.timecode_text, frame_rate);
    starts.push_back(timecode::normalize(tc, reference));
    if (starts.size() > 1 && starts.back() <= starts[starts.size() - 2]) {
      throw Error(ErrorCode::NonMonotonicMarkers,
                  "marker on line " + std::to_string(m.line_number) + " (" + m.timecode_text +
                      ") does not come after the previous marker");
    }
  }
  if (total_duration <= starts.back())
    throw Error(ErrorCode::NonMonotonicMarkers,
                "total duration " + std::to_string(total_duration.ms) +
                    " ms does not extend past the last marker");

  std::vector<Segment> out;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    Segment s;
    char id[16];
    std::snprintf(id, sizeof id, "-%03zu", k + 1);
    s.id = track_ref + id;
    s.track_ref = track_ref;
    s.start = starts[k];
    s.duration = ContentTime{(k + 1 < starts.size() ? starts[k + 1] : total_duration).ms -
                             starts[k].ms};
    s.loi = default_loi;
    s.label = markers[k].label;
    std::smatch m;
    if (std::regex_match(markers[k].label, m, loi_suffix)) {
      const std::string digits = m[2].str();
      const int loi = digits.size() > 6 ? 0 : std::stoi(digits);
      if (loi < 1)
        throw Error(ErrorCode::InvalidArgument, "marker on line " +
                                                    std::to_string(markers[k].line_number) +
                                                    ": LOI suffix must be >= 1");
      s.loi = loi;
      s.label = m[1].str();
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mga::meta

#include "mga/project_json.hpp"

namespace mga::meta {

using nlohmann::json;

json to_json(const Segment& s) {
  json j = {
      {"id", s.id},
      {"track_ref", s.track_ref},
      {"start_ms", s.start.ms},
      {"duration_ms", s.duration.ms},
      {"label", s.label},
      {"loi", s.loi},
      {"topics", s.topics},
  };
  j["location"] = s.location ? json{{"lat", s.location->lat}, {"lon", s.location->lon}} : json();
  j["timestamp"] = s.timestamp ? json(format_instant(*s.timestamp)) : json();
  return j;
}

json to_json(const Track& t) {
  return {
      {"id", t.id},
      {"index", t.index},
      {"kind", to_string(t.kind)},
      {"language", t.language ? json(*t.language) : json()},
      {"audio_ref", t.audio_ref ? json(*t.audio_ref) : json()},
  };
}

json to_json(const Programme& p) {
  json categories = json::object();
  for (const auto& [k, c] : p.categories) categories[k] = to_string(c);
  return {
      {"id", p.id},
      {"title", p.title},
      {"description", p.description ? json(*p.description) : json()},
      {"language", p.language ? json(*p.language) : json()},
      {"formal", p.formal},
      {"categories", categories},
  };
}

json to_json(const Project& project) {
  json tracks = json::array();
  for (const auto& t : project.tracks) tracks.push_back(to_json(t));
  json segments = json::array();
  for (const auto& s : project.segments) segments.push_back(to_json(s));
  return {{"programme", to_json(project.programme)}, {"tracks", tracks}, {"segments", segments}};
}

}  // namespace mga::meta

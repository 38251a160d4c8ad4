#include <algorithm>
#include <charconv>

#include "mga/metamodel.hpp"
#include "project_xml_internal.hpp"

namespace mga::meta {

namespace {

bool is_foreign(std::string_view name) {
  const auto prefix = xml::prefix_of(name);
  return !prefix.empty() || name == "xmlns";
}

template <typename T>
std::optional<T> parse_number(const std::string* text) {
  if (!text) return std::nullopt;
  T value{};
  const char* first = text->data();
  const char* last = first + text->size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text->empty()) return std::nullopt;
  return value;
}

xml::Element text_element(std::string name, std::string text) {
  xml::Element e;
  e.name = std::move(name);
  e.text = std::move(text);
  return e;
}

void append_extensions(xml::Element& e, const Extensions& ext) {
  for (const auto& [k, v] : ext.attributes) e.attributes.emplace_back(k, v);
  for (const auto& child : ext.elements) e.children.push_back(child);
}

class Decoder {
 public:
  DecodeResult run(const xml::Element& root) {
    if (xml::local_name(root.name) != kRootElement)
      fatal("/ root element is <" + root.name + ">, expected <" + std::string(kRootElement) + ">");

    for (const auto& [k, v] : root.attributes) {
      if (k == "version") {
        if (v != "1") add("BAD_VALUE", "/mgaProject/@version", "unsupported version '" + v + "'");
      } else if (k == "xmlns") {
        if (v != kNamespace)
          add("BAD_VALUE", "/mgaProject/@xmlns", "unexpected namespace '" + v + "'");
      } else if (is_foreign(k)) {
        result_.project.extensions.attributes.emplace_back(k, v);
      } else {
        add("UNKNOWN_ATTRIBUTE", "/mgaProject/@" + k, "attribute not in the vocabulary");
      }
    }
    if (!root.attribute("version"))
      add("MISSING_ATTRIBUTE", "/mgaProject/@version", "version attribute missing");

    bool have_programme = false;
    std::size_t track_n = 0;
    std::size_t segment_n = 0;
    for (const auto& child : root.children) {
      if (xml::prefix_of(child.name) != "") {
        result_.project.extensions.elements.push_back(child);
      } else if (child.name == "programme") {
        if (have_programme)
          add("DUPLICATE_ELEMENT", "/mgaProject/programme", "more than one <programme>");
        have_programme = true;
        result_.project.programme = programme(child);
      } else if (child.name == "track") {
        result_.project.tracks.push_back(track(child, ++track_n));
      } else if (child.name == "segment") {
        result_.project.segments.push_back(segment(child, ++segment_n));
      } else {
        add("UNKNOWN_ELEMENT", "/mgaProject/" + child.name, "element not in the vocabulary");
      }
    }
    if (!have_programme) fatal("/mgaProject/programme missing");
    return std::move(result_);
  }

 private:
  [[noreturn]] static void fatal(const std::string& message) {
    throw Error(ErrorCode::SchemaViolation, message);
  }

  void add(std::string code, std::string path, std::string message) {
    result_.findings.push_back({std::move(code), std::move(path), std::move(message)});
  }

  static std::string path_of(const xml::Element& e, std::string_view kind, std::size_t n) {
    if (const auto* id = e.attribute("id"))
      return "/mgaProject/" + std::string(kind) + "[@id='" + *id + "']";
    return "/mgaProject/" + std::string(kind) + "[" + std::to_string(n) + "]";
  }

  std::string required(const xml::Element& e, const std::string& path, std::string_view name) {
    if (const auto* v = e.attribute(name)) return *v;
    add("MISSING_ATTRIBUTE", path + "/@" + std::string(name), "attribute missing");
    return {};
  }

  // Routes foreign attributes to `ext` and reports unknown plain ones.
  void sort_attributes(const xml::Element& e, const std::string& path,
                       std::initializer_list<std::string_view> known, Extensions& ext) {
    for (const auto& [k, v] : e.attributes) {
      if (std::find(known.begin(), known.end(), k) != known.end()) continue;
      if (is_foreign(k)) {
        ext.attributes.emplace_back(k, v);
      } else {
        add("UNKNOWN_ATTRIBUTE", path + "/@" + k, "attribute not in the vocabulary");
      }
    }
  }

  Programme programme(const xml::Element& e) {
    const std::string path = "/mgaProject/programme";
    Programme p;
    p.id = required(e, path, "id");
    if (const auto* lang = e.attribute("language")) p.language = *lang;
    sort_attributes(e, path, {"id", "language"}, p.extensions);

    bool have_title = false;
    for (const auto& c : e.children) {
      if (!xml::prefix_of(c.name).empty()) {
        p.extensions.elements.push_back(c);
      } else if (c.name == "title") {
        have_title = true;
        p.title = c.text;
      } else if (c.name == "description") {
        p.description = c.text;
      } else if (c.name == "formal") {
        const auto* key = c.attribute("key");
        if (!key) {
          add("MISSING_ATTRIBUTE", path + "/formal/@key", "attribute missing");
          continue;
        }
        p.formal[*key] = c.text;
        if (const auto* cat = c.attribute("category")) {
          if (auto parsed = category_from_string(*cat)) {
            p.categories[*key] = *parsed;
          } else {
            add("BAD_VALUE", path + "/formal[@key='" + *key + "']/@category",
                "unknown category '" + *cat + "'");
          }
        }
      } else {
        add("UNKNOWN_ELEMENT", path + "/" + c.name, "element not in the vocabulary");
      }
    }
    if (!have_title) add("MISSING_ELEMENT", path + "/title", "title element missing");
    return p;
  }

  Track track(const xml::Element& e, std::size_t n) {
    const std::string path = path_of(e, "track", n);
    Track t;
    t.id = required(e, path, "id");
    const auto* index = e.attribute("index");
    if (auto v = parse_number<int>(index)) {
      t.index = *v;
    } else {
      t.index = -1;
      add(index ? "BAD_VALUE" : "MISSING_ATTRIBUTE", path + "/@index",
          index ? "index '" + *index + "' is not an integer" : "attribute missing");
    }
    if (const auto* kind = e.attribute("kind")) {
      if (auto k = track_kind_from_string(*kind)) {
        t.kind = *k;
      } else {
        add("BAD_VALUE", path + "/@kind", "unknown track kind '" + *kind + "'");
      }
    }
    if (const auto* lang = e.attribute("language")) t.language = *lang;
    if (const auto* ref = e.attribute("audioRef")) t.audio_ref = *ref;
    sort_attributes(e, path, {"id", "index", "kind", "language", "audioRef"}, t.extensions);
    for (const auto& c : e.children) {
      if (!xml::prefix_of(c.name).empty()) {
        t.extensions.elements.push_back(c);
      } else {
        add("UNKNOWN_ELEMENT", path + "/" + c.name, "element not in the vocabulary");
      }
    }
    return t;
  }

  Segment segment(const xml::Element& e, std::size_t n) {
    const std::string path = path_of(e, "segment", n);
    Segment s;
    s.id = required(e, path, "id");
    s.track_ref = required(e, path, "track");

    const auto* start = e.attribute("start");
    if (auto v = parse_number<std::uint64_t>(start)) {
      s.start = ContentTime{*v};
    } else {
      add(start ? "BAD_VALUE" : "MISSING_ATTRIBUTE", path + "/@start",
          start ? "start '" + *start + "' is not a millisecond count" : "attribute missing");
    }

    const auto* duration = e.attribute("duration");
    auto dur = parse_number<std::uint64_t>(duration);
    if (dur && *dur > 0) {
      s.duration = ContentTime{*dur};
    } else {
      add("BAD_DURATION", path + "/@duration",
          duration ? "duration '" + *duration + "' is not a positive millisecond count"
                   : "duration attribute missing");
    }

    const auto* loi = e.attribute("loi");
    auto level = parse_number<int>(loi);
    if (level && *level >= 1) {
      s.loi = *level;
    } else {
      s.loi = 0;
      add("BAD_LOI", path + "/@loi",
          loi ? "loi '" + *loi + "' must be an integer >= 1" : "loi attribute missing");
    }

    if (const auto* ts = e.attribute("timestamp")) {
      if (auto t = parse_instant(*ts)) {
        s.timestamp = *t;
      } else {
        add("BAD_VALUE", path + "/@timestamp", "'" + *ts + "' is not YYYY-MM-DDTHH:MM:SSZ");
      }
    }
    sort_attributes(e, path, {"id", "track", "start", "duration", "loi", "timestamp"},
                    s.extensions);

    for (const auto& c : e.children) {
      if (!xml::prefix_of(c.name).empty()) {
        s.extensions.elements.push_back(c);
      } else if (c.name == "label") {
        s.label = c.text;
      } else if (c.name == "topic") {
        s.topics.insert(c.text);
      } else if (c.name == "location") {
        auto lat = parse_number<double>(c.attribute("lat"));
        auto lon = parse_number<double>(c.attribute("lon"));
        GeoPoint g{lat.value_or(0.0), lon.value_or(0.0)};
        if (!lat || !lon || !g.valid()) {
          add("BAD_LOCATION", path + "/location", "lat/lon missing or out of range");
        } else {
          s.location = g;
        }
      } else {
        add("UNKNOWN_ELEMENT", path + "/" + c.name, "element not in the vocabulary");
      }
    }
    return s;
  }

  DecodeResult result_;
};

}  // namespace

namespace detail {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

DecodeResult decode_element(const xml::Element& root) { return Decoder{}.run(root); }

Project project_from_element(const xml::Element& root) {
  DecodeResult decoded = decode_element(root);
  if (!decoded.findings.empty())
    throw ValidationError(ErrorCode::SchemaViolation, std::move(decoded.findings));
  auto findings = validate(decoded.project);
  if (!findings.empty()) throw ValidationError(ErrorCode::ValidationFailed, std::move(findings));
  return std::move(decoded.project);
}

}  // namespace detail

std::string to_xml(const Project& project) {
  xml::Element root;
  root.name = std::string(kRootElement);
  root.attributes.emplace_back("xmlns", std::string(kNamespace));
  root.attributes.emplace_back("version", "1");

  const Programme& prog = project.programme;
  xml::Element pe;
  pe.name = "programme";
  pe.attributes.emplace_back("id", prog.id);
  if (prog.language) pe.attributes.emplace_back("language", *prog.language);
  pe.children.push_back(text_element("title", prog.title));
  if (prog.description) pe.children.push_back(text_element("description", *prog.description));
  for (const auto& [key, value] : prog.formal) {
    xml::Element f = text_element("formal", value);
    f.attributes.emplace_back("key", key);
    if (auto it = prog.categories.find(key); it != prog.categories.end())
      f.attributes.emplace_back("category", std::string(to_string(it->second)));
    pe.children.push_back(std::move(f));
  }
  append_extensions(pe, prog.extensions);
  root.children.push_back(std::move(pe));

  for (const Track& t : project.tracks) {
    xml::Element te;
    te.name = "track";
    te.attributes.emplace_back("id", t.id);
    te.attributes.emplace_back("index", std::to_string(t.index));
    te.attributes.emplace_back("kind", std::string(to_string(t.kind)));
    if (t.language) te.attributes.emplace_back("language", *t.language);
    if (t.audio_ref) te.attributes.emplace_back("audioRef", *t.audio_ref);
    append_extensions(te, t.extensions);
    root.children.push_back(std::move(te));
  }

  for (const Segment& s : project.segments) {
    xml::Element se;
    se.name = "segment";
    se.attributes.emplace_back("id", s.id);
    se.attributes.emplace_back("track", s.track_ref);
    se.attributes.emplace_back("start", std::to_string(s.start.ms));
    se.attributes.emplace_back("duration", std::to_string(s.duration.ms));
    se.attributes.emplace_back("loi", std::to_string(s.loi));
    if (s.timestamp) se.attributes.emplace_back("timestamp", format_instant(*s.timestamp));
    se.children.push_back(text_element("label", s.label));
    for (const auto& topic : s.topics) se.children.push_back(text_element("topic", topic));
    if (s.location) {
      xml::Element loc;
      loc.name = "location";
      loc.attributes.emplace_back("lat", detail::format_double(s.location->lat));
      loc.attributes.emplace_back("lon", detail::format_double(s.location->lon));
      se.children.push_back(std::move(loc));
    }
    append_extensions(se, s.extensions);
    root.children.push_back(std::move(se));
  }

  append_extensions(root, project.extensions);
  return xml::serialize_document(root);
}

DecodeResult decode_xml(std::string_view text) { return detail::decode_element(xml::parse(text)); }

Project from_xml(std::string_view text) { return detail::project_from_element(xml::parse(text)); }

bool is_project_xml(std::string_view text) {
  try {
    return xml::local_name(xml::parse(text).name) == kRootElement;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace mga::meta

#include "service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>

#include "cli.hpp"
#include "mga/assembly.hpp"
#include "mga/container.hpp"
#include "mga/error.hpp"
#include "mga/project_json.hpp"

namespace mga::tools {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json; charset=utf-8";

/// Client mistakes that are not domain errors (malformed body or header).
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
T parse_param(const httplib::Request& req, const std::string& name) {
  const std::string text = req.get_param_value(name);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument,
                "query parameter '" + name + "' has invalid value '" + text + "'");
  return value;
}

template <typename T>
T require_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name))
    throw Error(ErrorCode::InvalidArgument, "query parameter '" + name + "' is required");
  return parse_param<T>(req, name);
}

bool flag_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) return false;
  const std::string v = req.get_param_value(name);
  if (v.empty() || v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw Error(ErrorCode::InvalidArgument, "query parameter '" + name + "' must be true or false");
}

std::uint64_t parse_if_match(const std::string& header) {
  std::string_view v = header;
  if (v.starts_with("W/")) v.remove_prefix(2);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  std::uint64_t rev = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), rev);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw BadRequest("If-Match must carry a revision number, got '" + header + "'");
  return rev;
}

void apply_patch(meta::Segment& segment, const json& body) {
  if (!body.is_object()) throw BadRequest("PATCH body must be a JSON object");
  for (const auto& [key, value] : body.items()) {
    if (key == "loi") {
      if (!value.is_number_integer())
        throw Error(ErrorCode::InvalidArgument, "loi must be an integer");
      const auto loi = value.get<std::int64_t>();
      if (loi < std::numeric_limits<int>::min() || loi > std::numeric_limits<int>::max())
        throw Error(ErrorCode::InvalidArgument, "loi out of range");
      segment.loi = static_cast<int>(loi);
    } else if (key == "label") {
      if (!value.is_string()) throw Error(ErrorCode::InvalidArgument, "label must be a string");
      segment.label = value.get<std::string>();
    } else if (key == "topics") {
      if (!value.is_array()) throw Error(ErrorCode::InvalidArgument, "topics must be an array");
      std::set<std::string> topics;
      for (const auto& t : value) {
        if (!t.is_string()) throw Error(ErrorCode::InvalidArgument, "topics must be strings");
        topics.insert(t.get<std::string>());
      }
      segment.topics = std::move(topics);
    } else {
      throw Error(ErrorCode::InvalidArgument, "field '" + key + "' cannot be patched");
    }
  }
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.audio_dir.empty()) {
    options_.audio_dir =
        options_.project_path.has_parent_path() ? options_.project_path.parent_path() : ".";
  }
  std::error_code ec;
  if (!fs::is_directory(options_.audio_dir, ec))
    throw IoError("audio directory '" + options_.audio_dir.string() + "' is not readable");
  if (options_.static_dir && !fs::is_directory(*options_.static_dir, ec))
    throw IoError("static directory '" + options_.static_dir->string() + "' is not readable");
  quality::check_spec(options_.spec);

  origin_ = load_project(options_.project_path);
  sources_ = load_sources(origin_.project, options_.audio_dir);
  state_ = {origin_.project, 1};

  server_ = std::make_unique<httplib::Server>();
  install_routes();
}

Service::~Service() { stop(); }

Snapshot Service::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

int Service::bind() {
  if (options_.port == 0) {
    options_.port = server_->bind_to_any_port(options_.host);
    if (options_.port < 0) throw IoError("cannot bind to " + options_.host);
  } else if (!server_->bind_to_port(options_.host, options_.port)) {
    throw IoError("cannot bind to " + options_.host + ":" + std::to_string(options_.port));
  }
  return options_.port;
}

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

bool Service::listen() {
  bind();
  return listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::is_running() const { return server_ && server_->is_running(); }

void Service::install_routes() {
  auto& srv = *server_;

  // Every handler works on a snapshot; the revision header reflects the
  // state the body was computed from.
  auto respond_json = [](httplib::Response& res, std::uint64_t revision, int status,
                         const json& body) {
    res.status = status;
    res.set_header("X-Revision", std::to_string(revision));
    res.set_content(body.dump(2) + "\n", kJson);
  };

  auto guarded = [this, respond_json](auto handler) {
    return [this, respond_json, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const BadRequest& e) {
        respond_json(res, snapshot().revision, 400,
                     {{"code", "BadRequest"}, {"message", e.what()}});
      } catch (const IoError& e) {
        respond_json(res, snapshot().revision, 500, {{"code", "IoError"}, {"message", e.what()}});
      } catch (const Error& e) {
        respond_json(res, snapshot().revision, 422, error_json(e));
      }
    };
  };

  srv.set_exception_handler([this, respond_json](const httplib::Request&, httplib::Response& res,
                                                 std::exception_ptr ep) {
    std::string message = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    respond_json(res, snapshot().revision, 500, {{"code", "InternalError"}, {"message", message}});
  });

  srv.Get("/api/project", guarded([this, respond_json](const httplib::Request&,
                                                        httplib::Response& res) {
    const auto snap = snapshot();
    json body = meta::to_json(snap.project);
    body["revision"] = snap.revision;
    res.set_header("ETag", "\"" + std::to_string(snap.revision) + "\"");
    respond_json(res, snap.revision, 200, body);
  }));

  srv.Get("/api/assemble", guarded([this, respond_json](const httplib::Request& req,
                                                         httplib::Response& res) {
    const auto snap = snapshot();
    const auto target = require_param<std::uint64_t>(req, "target_ms");
    const bool overflow = flag_param(req, "allow_overflow");
    respond_json(res, snap.revision, 200, assemble_json(snap.project, target, overflow));
  }));

  srv.Get("/api/filter", guarded([this, respond_json](const httplib::Request& req,
                                                       httplib::Response& res) {
    const auto snap = snapshot();
    assembly::RegionalFilter f;
    f.center = {require_param<double>(req, "lat"), require_param<double>(req, "lon")};
    f.max_km = req.has_param("max_km") ? parse_param<double>(req, "max_km")
                                       : std::numeric_limits<double>::infinity();
    f.max_age = req.has_param("max_age_s")
                    ? std::chrono::seconds(parse_param<std::int64_t>(req, "max_age_s"))
                    : std::chrono::seconds::max();
    if (req.has_param("now")) {
      auto now = meta::parse_instant(req.get_param_value("now"));
      if (!now) throw Error(ErrorCode::InvalidArgument, "now must be YYYY-MM-DDTHH:MM:SSZ");
      f.now = *now;
    } else {
      f.now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    }
    f.keep_unlocated = flag_param(req, "keep_unlocated");
    respond_json(res, snap.revision, 200, meta::to_json(assembly::filter_regional(snap.project, f)));
  }));

  srv.Get("/api/quality", guarded([this, respond_json](const httplib::Request&,
                                                        httplib::Response& res) {
    const auto snap = snapshot();
    respond_json(res, snap.revision, 200,
                 quality::to_json(quality::validate_project(snap.project, options_.spec)));
  }));

  srv.Get("/api/render", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto snap = snapshot();
    const auto target = require_param<std::uint64_t>(req, "target_ms");
    render::RenderConfig config;
    if (req.has_param("crossfade_ms"))
      config.crossfade_ms = parse_param<std::uint32_t>(req, "crossfade_ms");
    const auto sel =
        assembly::select_by_loi(snap.project, ContentTime{target}, flag_param(req, "allow_overflow"));
    const auto edl = assembly::to_edl(sel, snap.project, config.crossfade_ms);
    const auto sliced = assembly::slice(snap.project, sel);
    const auto bytes =
        container::write_container(render::render(edl, sources_, config, &sliced));
    res.set_header("X-Revision", std::to_string(snap.revision));
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "audio/wav");
  }));

  srv.Get(R"(/api/audio/([^/]+))", guarded([this, respond_json](const httplib::Request& req,
                                                                 httplib::Response& res) {
    const auto snap = snapshot();
    const std::string track_ref = req.matches[1];
    const auto* track = snap.project.find_track(track_ref);
    const auto path = track ? track_audio_path(*track, options_.audio_dir) : std::nullopt;
    if (!path) {
      respond_json(res, snap.revision, 404,
                   {{"code", "NotFound"}, {"message", "no audio for track '" + track_ref + "'"}});
      return;
    }
    const auto bytes = read_file(*path);
    res.set_header("X-Revision", std::to_string(snap.revision));
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "audio/wav");
  }));

  srv.Patch(R"(/api/segments/([^/]+))", guarded([this, respond_json](const httplib::Request& req,
                                                                      httplib::Response& res) {
    const std::string id = req.matches[1];
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw BadRequest(std::string("PATCH body is not JSON: ") + e.what());
    }
    std::optional<std::uint64_t> expected;
    if (req.has_header("If-Match")) expected = parse_if_match(req.get_header_value("If-Match"));

    std::unique_lock lock(mutex_);
    const auto current = state_.revision;
    if (expected && *expected != current) {
      res.set_header("ETag", "\"" + std::to_string(current) + "\"");
      respond_json(res, current, 409,
                   {{"code", "RevisionConflict"},
                    {"message", "If-Match revision " + std::to_string(*expected) +
                                    " is stale; current revision is " + std::to_string(current)}});
      return;
    }
    if (!state_.project.find_segment(id)) {
      respond_json(res, current, 404,
                   {{"code", "NotFound"}, {"message", "no segment with id '" + id + "'"}});
      return;
    }
    auto candidate = state_.project;
    apply_patch(*candidate.find_segment(id), body);
    auto findings = meta::validate(candidate);
    if (!findings.empty()) throw meta::ValidationError(ErrorCode::ValidationFailed, std::move(findings));
    state_.project = std::move(candidate);
    state_.revision = current + 1;

    json out = meta::to_json(*state_.project.find_segment(id));
    res.set_header("ETag", "\"" + std::to_string(state_.revision) + "\"");
    respond_json(res, state_.revision, 200, out);
  }));

  srv.Post("/api/save", guarded([this, respond_json](const httplib::Request&,
                                                      httplib::Response& res) {
    // Exclusive so two saves cannot interleave and no PATCH lands mid-save.
    std::unique_lock lock(mutex_);
    save_project(origin_, state_.project);
    respond_json(res, state_.revision, 200,
                 {{"saved", origin_.path.string()}, {"revision", state_.revision}});
  }));

  if (options_.static_dir) srv.set_mount_point("/", options_.static_dir->string());
}

}  // namespace mga::tools

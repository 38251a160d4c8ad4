#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

#include "files.hpp"
#include "mga/assembly.hpp"
#include "mga/container.hpp"
#include "mga/error.hpp"
#include "mga/quality.hpp"
#include "mga/renderer.hpp"
#include "mga/timecode.hpp"
#include "service.hpp"

namespace mga::tools {

namespace {

using nlohmann::json;

ByteView as_bytes(const std::string& s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

void emit(CommandResult& r, const std::optional<std::string>& output, const std::string& text) {
  if (output && *output != "-") {
    write_file_atomic(*output, as_bytes(text));
  } else {
    r.out += text;
  }
}

struct InspectArgs {
  std::string file;
  bool json = false;
};

CommandResult inspect(const InspectArgs& a) {
  const Bytes bytes = read_file(a.file);
  const auto file = container::parse_container(bytes, {.allow_truncated_data = true});
  const auto layout = container::chunk_layout(file);
  const auto& info = file.audio_info;
  CommandResult r;
  if (a.json) {
    json chunks = json::array();
    for (const auto& c : layout)
      chunks.push_back({{"fourcc", c.id.str()}, {"offset", c.offset}, {"size", c.size}});
    json j = {{"format", container::to_string(file.format_tag)},
              {"total_content_size", file.total_content_size},
              {"audio",
               {{"sample_rate", info.sample_rate},
                {"channels", info.channel_count},
                {"bits_per_sample", info.bits_per_sample},
                {"frames", info.frame_count}}},
              {"chunks", chunks}};
    if (auto bext = container::read_bext(file))
      j["bext"] = {{"description", bext->description},
                   {"originator", bext->originator},
                   {"originator_reference", bext->originator_reference},
                   {"origination_date", bext->origination_date},
                   {"origination_time", bext->origination_time},
                   {"time_reference", bext->time_reference}};
    r.out = j.dump(2) + "\n";
    return r;
  }
  std::ostringstream out;
  char line[160];
  out << "format " << container::to_string(file.format_tag) << ", " << file.total_content_size
      << " content bytes\n";
  std::snprintf(line, sizeof line, "audio  %u Hz, %u ch, %u bit, %llu frames\n\n",
                info.sample_rate, info.channel_count, info.bits_per_sample,
                static_cast<unsigned long long>(info.frame_count));
  out << line;
  std::snprintf(line, sizeof line, "%-6s %14s %14s\n", "FOURCC", "OFFSET", "SIZE");
  out << line;
  for (const auto& c : layout) {
    std::snprintf(line, sizeof line, "%-6s %14llu %14llu\n", ("'" + c.id.str() + "'").c_str(),
                  static_cast<unsigned long long>(c.offset),
                  static_cast<unsigned long long>(c.size));
    out << line;
  }
  if (auto bext = container::read_bext(file))
    out << "\nbext description: " << bext->description << "\n";
  r.out = out.str();
  return r;
}

struct EmbedArgs {
  std::string project;
  std::string audio;
  std::string output;
  bool bw64 = false;
  bool replace_foreign = false;
};

CommandResult embed(const EmbedArgs& a) {
  const auto project = meta::from_xml(load_project_text(a.project));
  auto file = container::parse_container(read_file(a.audio));
  if (a.bw64) file = container::upgrade_to_bw64(std::move(file));
  file = meta::embed(project, std::move(file), {.replace_foreign = a.replace_foreign});
  write_file_atomic(a.output, container::write_container(file));
  CommandResult r;
  r.out = "embedded " + std::to_string(project.segments.size()) + " segment(s) into " + a.output +
          " (" + std::string(container::to_string(file.format_tag)) + ")\n";
  return r;
}

struct ExtractArgs {
  std::string audio;
  std::optional<std::string> output;
  bool lenient = false;
};

CommandResult extract(const ExtractArgs& a) {
  const auto file = container::parse_container(read_file(a.audio));
  const auto project = meta::extract(file, !a.lenient);
  CommandResult r;
  if (!project) {
    r.exit_code = 1;
    r.err = "no project metadata in '" + a.audio + "'\n";
    return r;
  }
  emit(r, a.output, meta::to_xml(*project));
  return r;
}

struct IngestArgs {
  std::string markers;
  std::string reference = "00:00:00";
  std::optional<unsigned> fps;
  bool default_fps = false;
  std::string track = "main";
  std::string kind = "dialogue";
  std::optional<std::string> total;
  std::optional<std::string> audio;
  int loi = 1;
  std::optional<std::string> format;
  std::optional<std::string> into;
  std::string programme_id = "programme";
  std::optional<std::string> title;
  std::optional<std::string> output;
};

CommandResult ingest(const IngestArgs& a) {
  std::optional<unsigned> fps = a.fps;
  if (!fps && a.default_fps) fps = timecode::kDefaultFrameRate;

  std::optional<timecode::MarkerFormat> hint;
  if (a.format) {
    hint = timecode::marker_format_from_name("." + *a.format);
    if (!hint) throw Error(ErrorCode::InvalidArgument, "unknown marker format '" + *a.format + "'");
  } else {
    hint = timecode::marker_format_from_name(a.markers);
  }
  const auto markers = timecode::ingest_marker_file(read_file(a.markers), hint, fps);
  const auto reference = timecode::parse_timecode(a.reference, fps);

  ContentTime total;
  std::optional<std::string> audio_ref;
  if (a.total) {
    total = ContentTime{parse_duration_ms(*a.total)};
  } else if (a.audio) {
    const auto file = container::parse_container(read_file(*a.audio));
    total = ContentTime{file.audio_info.frame_count * 1000 / file.audio_info.sample_rate};
    audio_ref = fs::path(*a.audio).filename().string();
  } else {
    throw Error(ErrorCode::InvalidArgument, "one of --total or --audio is required");
  }
  auto kind = meta::track_kind_from_string(a.kind);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown track kind '" + a.kind + "'");

  auto segments = meta::segments_from_markers(markers, a.track, reference, fps, total, a.loi);

  meta::Project project;
  if (a.into) {
    project = load_project(*a.into).project;
  } else {
    project.programme.id = a.programme_id;
    project.programme.title = a.title.value_or(fs::path(a.markers).stem().string());
  }
  std::erase_if(project.segments,
                [&](const meta::Segment& s) { return s.track_ref == a.track; });
  if (!project.find_track(a.track)) {
    meta::Track t;
    t.id = a.track;
    t.index = static_cast<int>(project.tracks.size());
    t.kind = *kind;
    t.audio_ref = audio_ref;
    project.tracks.push_back(std::move(t));
  }
  project.segments.insert(project.segments.end(), segments.begin(), segments.end());
  project = meta::build_project(std::move(project.programme), std::move(project.tracks),
                                std::move(project.segments));

  CommandResult r;
  emit(r, a.output, meta::to_xml(project));
  r.err = "ingested " + std::to_string(segments.size()) + " marker(s)\n";
  return r;
}

struct ValidateArgs {
  std::string project;
  std::optional<std::string> spec;
  bool text = false;
};

CommandResult validate(const ValidateArgs& a) {
  const quality::ElementSpec spec = a.spec
                                        ? quality::element_spec_from_xml(
                                              mga::to_string(ByteView(read_file(*a.spec))))
                                        : quality::default_segment_spec();
  const auto decoded = meta::decode_xml(load_project_text(a.project));

  std::vector<meta::ValidationFinding> structural = decoded.findings;
  for (auto& f : meta::validate(decoded.project)) {
    const bool dup = std::any_of(structural.begin(), structural.end(), [&](const auto& g) {
      return g.code == f.code && g.path == f.path;
    });
    if (!dup) structural.push_back(std::move(f));
  }

  quality::QualityReport report;
  if (!decoded.project.segments.empty()) {
    report = quality::validate_project(decoded.project, spec);
  } else {
    quality::check_spec(spec);
  }
  std::vector<quality::Finding> findings;
  for (const auto& f : structural)
    findings.push_back({quality::Severity::error, f.code, "", f.path, f.message});
  findings.insert(findings.end(), report.findings.begin(), report.findings.end());
  report.findings = std::move(findings);

  CommandResult r;
  r.out = a.text ? quality::to_text(report) : quality::to_json(report).dump(2) + "\n";
  if (report.has_errors()) {
    r.exit_code = 1;
    for (const auto& f : report.findings)
      if (f.severity == quality::Severity::error)
        r.err += f.code + " " + (f.record_id.empty() ? f.field : f.record_id) + ": " + f.message +
                 "\n";
  }
  return r;
}

struct AssembleArgs {
  std::string project;
  std::string target;
  bool allow_overflow = false;
  bool edl = false;
  std::uint32_t crossfade_ms = 10;
};

CommandResult assemble(const AssembleArgs& a) {
  const auto project = load_project(a.project).project;
  const std::uint64_t target = parse_duration_ms(a.target);
  CommandResult r;
  if (a.edl) {
    const auto sel = assembly::select_by_loi(project, ContentTime{target}, a.allow_overflow);
    r.out = assembly::to_json(assembly::to_edl(sel, project, a.crossfade_ms)).dump(2) + "\n";
  } else {
    r.out = assemble_json(project, target, a.allow_overflow).dump(2) + "\n";
  }
  return r;
}

struct FilterArgs {
  std::string project;
  std::string near;
  double max_km = 0.0;
  std::string max_age;
  std::optional<std::string> now;
  bool keep_unlocated = false;
  std::optional<std::string> output;
};

CommandResult filter(const FilterArgs& a) {
  const auto project = load_project(a.project).project;
  assembly::RegionalFilter f;
  const auto comma = a.near.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("no comma");
    f.center = {std::stod(a.near.substr(0, comma)), std::stod(a.near.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "--near expects LAT,LON, got '" + a.near + "'");
  }
  f.max_km = a.max_km;
  f.max_age = std::chrono::seconds(parse_duration_ms(a.max_age) / 1000);
  if (a.now) {
    auto t = meta::parse_instant(*a.now);
    if (!t) throw Error(ErrorCode::InvalidArgument, "--now expects YYYY-MM-DDTHH:MM:SSZ");
    f.now = *t;
  } else {
    f.now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  }
  f.keep_unlocated = a.keep_unlocated;
  const auto filtered = assembly::filter_regional(project, f);
  CommandResult r;
  emit(r, a.output, meta::to_xml(filtered));
  r.err = "kept " + std::to_string(filtered.segments.size()) + " of " +
          std::to_string(project.segments.size()) + " segment(s)\n";
  return r;
}

struct RenderArgs {
  std::string project;
  std::string target;
  std::string audio_dir;
  std::string output;
  bool allow_overflow = false;
  std::uint32_t crossfade_ms = 10;
  std::uint16_t bits = 16;
  bool silence_missing = false;
};

CommandResult render_cmd(const RenderArgs& a) {
  const auto project = load_project(a.project).project;
  const auto sel = assembly::select_by_loi(project, ContentTime{parse_duration_ms(a.target)},
                                           a.allow_overflow);
  const auto edl = assembly::to_edl(sel, project, a.crossfade_ms);
  const auto sources = load_sources(project, a.audio_dir);
  const render::RenderConfig config{a.crossfade_ms, a.bits, !a.silence_missing};
  const auto sliced = assembly::slice(project, sel);
  const auto file = render::render(edl, sources, config, &sliced);
  write_file_atomic(a.output, container::write_container(file));

  CommandResult r;
  r.out = json{{"output", a.output},
               {"selection", assembly::to_json(sel)},
               {"frames", file.audio_info.frame_count},
               {"sample_rate", file.audio_info.sample_rate},
               {"duration_ms", render::total_duration(edl, config).ms}}
              .dump(2) +
          "\n";
  return r;
}

}  // namespace

json assemble_json(const meta::Project& project, std::uint64_t target_ms, bool allow_overflow) {
  return assembly::to_json(assembly::select_by_loi(project, ContentTime{target_ms}, allow_overflow));
}

json error_json(const std::exception& e) {
  json j = {{"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["code"] = to_string(err->code());
  } else {
    j["code"] = "InternalError";
  }
  if (const auto* v = dynamic_cast<const meta::ValidationError*>(&e)) {
    json findings = json::array();
    for (const auto& f : v->findings())
      findings.push_back({{"code", f.code}, {"path", f.path}, {"message", f.message}});
    j["findings"] = findings;
  }
  return j;
}

CommandResult run(const std::vector<std::string>& argv) {
  // Rejects malformed durations while parsing so they count as usage errors.
  const CLI::Validator duration(
      [](std::string& text) -> std::string {
        try {
          parse_duration_ms(text);
          return {};
        } catch (const Error& e) {
          return e.what();
        }
      },
      "DURATION");

  CLI::App app{"Metadata-guided audio toolkit", "mga"};
  app.require_subcommand(1);

  InspectArgs inspect_args;
  auto* inspect_cmd = app.add_subcommand("inspect", "List the chunks of a WAVE/RF64/BW64 file");
  inspect_cmd->add_option("file", inspect_args.file, "Audio file")->required();
  inspect_cmd->add_flag("--json", inspect_args.json, "Machine-readable output");

  EmbedArgs embed_args;
  auto* embed_cmd = app.add_subcommand("embed", "Write project metadata into an audio file's axml chunk");
  embed_cmd->add_option("project", embed_args.project, "Project XML")->required();
  embed_cmd->add_option("audio", embed_args.audio, "Audio file")->required();
  embed_cmd->add_option("-o,--output", embed_args.output, "Output file")->required();
  embed_cmd->add_flag("--bw64", embed_args.bw64, "Write as BW64 even when RIFF would do");
  embed_cmd->add_flag("--replace-foreign", embed_args.replace_foreign,
                      "Overwrite an axml chunk holding other XML");

  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "Print the project embedded in an audio file");
  extract_cmd->add_option("audio", extract_args.audio, "Audio file")->required();
  extract_cmd->add_option("-o,--output", extract_args.output, "Write XML here instead of stdout");
  extract_cmd->add_flag("--lenient", extract_args.lenient, "Treat foreign axml as absent");

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest-markers", "Build segments from a DAW marker file");
  ingest_cmd->add_option("markers", ingest_args.markers, "CSV, TSV or TXT marker file")->required();
  ingest_cmd->add_option("--ref", ingest_args.reference, "Reference start timecode")
      ->capture_default_str();
  ingest_cmd->add_option("--fps", ingest_args.fps, "Frame rate for HH:MM:SS:FF timecodes");
  ingest_cmd->add_flag("--default-fps", ingest_args.default_fps, "Assume 25 fps when --fps is absent");
  ingest_cmd->add_option("--track", ingest_args.track, "Track id")->capture_default_str();
  ingest_cmd->add_option("--kind", ingest_args.kind, "Track kind")->capture_default_str();
  ingest_cmd->add_option("--total", ingest_args.total, "Content duration")->check(duration);
  ingest_cmd->add_option("--audio", ingest_args.audio, "Track audio; sets duration and audioRef");
  ingest_cmd->add_option("--loi", ingest_args.loi, "LOI for labels without #L<n>")
      ->capture_default_str();
  ingest_cmd->add_option("--format", ingest_args.format, "csv, tsv or txt");
  ingest_cmd->add_option("--into", ingest_args.into, "Add to this project instead of a new one");
  ingest_cmd->add_option("--programme-id", ingest_args.programme_id, "Programme id")
      ->capture_default_str();
  ingest_cmd->add_option("--title", ingest_args.title, "Programme title");
  ingest_cmd->add_option("-o,--output", ingest_args.output, "Write XML here instead of stdout");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check a project and score its metadata");
  validate_cmd->add_option("project", validate_args.project, "Project XML or audio file")->required();
  validate_cmd->add_option("--spec", validate_args.spec, "Element spec XML");
  validate_cmd->add_flag("--text", validate_args.text, "Human-readable table instead of JSON");

  AssembleArgs assemble_args;
  auto* assemble_cmd = app.add_subcommand("assemble", "Select segments to fit a target duration");
  assemble_cmd->add_option("project", assemble_args.project, "Project XML or audio file")->required();
  assemble_cmd->add_option("--target", assemble_args.target, "Target duration")
      ->required()
      ->check(duration);
  assemble_cmd->add_flag("--allow-overflow", assemble_args.allow_overflow,
                         "Keep all LOI-1 content even past the target");
  assemble_cmd->add_flag("--edl", assemble_args.edl, "Print the edit decision list");
  assemble_cmd->add_option("--crossfade", assemble_args.crossfade_ms, "Crossfade in ms (EDL)")
      ->capture_default_str();

  FilterArgs filter_args;
  auto* filter_cmd = app.add_subcommand("filter", "Keep segments near a place and recent enough");
  filter_cmd->add_option("project", filter_args.project, "Project XML or audio file")->required();
  filter_cmd->add_option("--near", filter_args.near, "LAT,LON")->required();
  filter_cmd->add_option("--max-km", filter_args.max_km, "Distance limit")->required();
  filter_cmd->add_option("--max-age", filter_args.max_age, "Age limit, e.g. 48h")
      ->required()
      ->check(duration);
  filter_cmd->add_option("--now", filter_args.now, "Reference instant (default: current time)");
  filter_cmd->add_flag("--keep-unlocated", filter_args.keep_unlocated,
                       "Keep segments without location or timestamp");
  filter_cmd->add_option("-o,--output", filter_args.output, "Write XML here instead of stdout");

  RenderArgs render_args;
  auto* render_cmd_opt = app.add_subcommand("render", "Assemble and render to a WAVE file");
  render_cmd_opt->add_option("project", render_args.project, "Project XML or audio file")->required();
  render_cmd_opt->add_option("--target", render_args.target, "Target duration")
      ->required()
      ->check(duration);
  render_cmd_opt->add_option("--audio-dir", render_args.audio_dir, "Directory of track audio")
      ->required();
  render_cmd_opt->add_option("-o,--output", render_args.output, "Output audio file")->required();
  render_cmd_opt->add_flag("--allow-overflow", render_args.allow_overflow,
                           "Keep all LOI-1 content even past the target");
  render_cmd_opt->add_option("--crossfade", render_args.crossfade_ms, "Crossfade in ms")
      ->capture_default_str();
  render_cmd_opt->add_option("--bits", render_args.bits, "Output bit depth")
      ->check(CLI::IsMember({16, 24}))
      ->capture_default_str();
  render_cmd_opt->add_flag("--silence-missing", render_args.silence_missing,
                           "Render silence for tracks without audio");

  ServiceOptions serve_args;
  std::string serve_project;
  std::optional<std::string> serve_audio_dir;
  std::optional<std::string> serve_spec;
  std::optional<std::string> serve_static;
  auto* serve_cmd = app.add_subcommand("serve", "Run the editor preview HTTP API");
  serve_cmd->add_option("project", serve_project, "Project XML or audio file")->required();
  serve_cmd->add_option("--audio-dir", serve_audio_dir, "Directory of track audio");
  serve_cmd->add_option("--port", serve_args.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", serve_args.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--spec", serve_spec, "Element spec XML for /api/quality");
  serve_cmd->add_option("--static", serve_static, "Directory served at /");

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());

  CommandResult result;
  std::ostringstream out, err;
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.out = out.str();
    result.err = err.str();
    if (code != 0) {
      result.exit_code = 2;
      if (result.err.find("--help") == std::string::npos)
        result.err += "Run with --help for usage.\n";
    }
    return result;
  }

  try {
    if (*inspect_cmd) return inspect(inspect_args);
    if (*embed_cmd) return embed(embed_args);
    if (*extract_cmd) return extract(extract_args);
    if (*ingest_cmd) return ingest(ingest_args);
    if (*validate_cmd) return validate(validate_args);
    if (*assemble_cmd) return assemble(assemble_args);
    if (*filter_cmd) return filter(filter_args);
    if (*render_cmd_opt) return render_cmd(render_args);
    if (*serve_cmd) {
      serve_args.project_path = serve_project;
      if (serve_audio_dir) serve_args.audio_dir = *serve_audio_dir;
      if (serve_static) serve_args.static_dir = *serve_static;
      serve_args.spec = serve_spec ? quality::element_spec_from_xml(
                                         mga::to_string(ByteView(read_file(*serve_spec))))
                                   : quality::default_segment_spec();
      Service service(std::move(serve_args));
      std::fprintf(stderr, "serving on http://%s:%d\n", service.options().host.c_str(),
                   service.options().port);
      if (!service.listen()) throw IoError("cannot listen on port " + std::to_string(service.options().port));
      return result;
    }
  } catch (const IoError& e) {
    result.exit_code = 2;
    result.err = std::string("error: ") + e.what() + "\n";
  } catch (const Error& e) {
    result.exit_code = 1;
    result.err = "error: " + std::string(to_string(e.code())) + ": " + e.what() + "\n";
    if (const auto* v = dynamic_cast<const meta::ValidationError*>(&e))
      for (const auto& f : v->findings())
        result.err += "  " + f.code + " " + f.path + ": " + f.message + "\n";
  }
  return result;
}

}  // namespace mga::tools

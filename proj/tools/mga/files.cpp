#include "files.hpp"

#include <fstream>
#include <random>
#include <regex>

#include "mga/container.hpp"
#include "mga/error.hpp"

namespace mga::tools {

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return data;
}

void write_file_atomic(const fs::path& path, ByteView data,
                       const std::function<void(const fs::path& temp)>& before_commit) {
  std::random_device rd;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path temp =
      dir / ("." + path.filename().string() + ".tmp-" + std::to_string(rd() & 0xFFFFFF));
  try {
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot create '" + temp.string() + "'");
      out.write(reinterpret_cast<const char*>(data.data()),
                static_cast<std::streamsize>(data.size()));
      out.flush();
      if (!out) throw IoError("write error on '" + temp.string() + "'");
    }
    if (before_commit) before_commit(temp);
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
  } catch (...) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw;
  }
}

std::uint64_t parse_duration_ms(std::string_view text) {
  static const std::regex re(R"(^\s*(?:(\d+)(ms|s|m|h|d)?|(\d+)m(\d+)s)\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, re))
    throw Error(ErrorCode::InvalidArgument,
                "cannot read duration '" + std::string(text) +
                    "' (use NNNms, NNs, MMmSSs or a bare millisecond count)");
  try {
    if (m[3].matched) return (std::stoull(m[3].str()) * 60 + std::stoull(m[4].str())) * 1000;
    const std::uint64_t n = std::stoull(m[1].str());
    const std::string unit = m[2].str();
    if (unit.empty() || unit == "ms") return n;
    if (unit == "s") return n * 1000;
    if (unit == "m") return n * 60'000;
    if (unit == "h") return n * 3'600'000;
    return n * 86'400'000;
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::InvalidArgument, "duration '" + std::string(text) + "' out of range");
  }
}

bool looks_like_container(ByteView bytes) {
  if (bytes.size() < 4) return false;
  const std::string magic(bytes.begin(), bytes.begin() + 4);
  return magic == "RIFF" || magic == "RF64" || magic == "BW64";
}

std::string load_project_text(const fs::path& path) {
  const Bytes bytes = read_file(path);
  if (!looks_like_container(bytes)) return mga::to_string(ByteView(bytes));
  const auto file = container::parse_container(bytes);
  auto xml = container::read_axml(file);
  if (!xml)
    throw Error(ErrorCode::SchemaViolation, "'" + path.string() + "' carries no axml chunk");
  return *xml;
}

LoadedProject load_project(const fs::path& path) {
  const Bytes bytes = read_file(path);
  LoadedProject out;
  out.path = path;
  if (looks_like_container(bytes)) {
    out.from_audio = true;
    auto project = meta::extract(container::parse_container(bytes), true);
    if (!project)
      throw Error(ErrorCode::SchemaViolation, "'" + path.string() + "' carries no project metadata");
    out.project = std::move(*project);
  } else {
    out.project = meta::from_xml(mga::to_string(ByteView(bytes)));
  }
  return out;
}

void save_project(const LoadedProject& target, const meta::Project& project) {
  if (target.from_audio) {
    auto file = container::parse_container(read_file(target.path));
    file = meta::embed(project, std::move(file));
    write_file_atomic(target.path, container::write_container(file));
  } else {
    const std::string xml = meta::to_xml(project);
    write_file_atomic(target.path, ByteView(reinterpret_cast<const std::uint8_t*>(xml.data()),
                                            xml.size()));
  }
}

std::optional<fs::path> track_audio_path(const meta::Track& track, const fs::path& audio_dir) {
  const fs::path candidate = audio_dir / (track.audio_ref ? *track.audio_ref : track.id + ".wav");
  std::error_code ec;
  if (fs::is_regular_file(candidate, ec)) return candidate;
  return std::nullopt;
}

render::AudioSources load_sources(const meta::Project& project, const fs::path& audio_dir) {
  render::AudioSources sources;
  for (const auto& t : project.tracks) {
    if (auto path = track_audio_path(t, audio_dir))
      sources.emplace(t.id, container::parse_container(read_file(*path)));
  }
  return sources;
}

}  // namespace mga::tools

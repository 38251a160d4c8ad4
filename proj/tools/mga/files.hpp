#pragma once

// File-level helpers shared by the CLI and the HTTP service.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mga/byte_io.hpp"
#include "mga/metamodel.hpp"
#include "mga/renderer.hpp"

namespace mga::tools {

namespace fs = std::filesystem;

/// Unreadable/unwritable paths. Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Bytes read_file(const fs::path& path);

/// Writes to a sibling temp file and renames it over `path`. The hook runs
/// after the temp file is complete and before the rename; if anything
/// throws, the temp file is removed and `path` is untouched.
void write_file_atomic(const fs::path& path, ByteView data,
                       const std::function<void(const fs::path& temp)>& before_commit = {});

/// "1500ms", "90s", "3m20s", "2m", "1h", "2d" or a bare millisecond count.
std::uint64_t parse_duration_ms(std::string_view text);

bool looks_like_container(ByteView bytes);

/// A project read from .xml or from the axml chunk of an audio file.
struct LoadedProject {
  meta::Project project;
  fs::path path;
  bool from_audio = false;
};

LoadedProject load_project(const fs::path& path);

/// Raw XML text of a project file (the axml payload for audio files).
std::string load_project_text(const fs::path& path);

/// Saves `project` back where it came from (re-embedding for audio files).
void save_project(const LoadedProject& target, const meta::Project& project);

/// Track audio is audio_dir/<audio_ref>, falling back to audio_dir/<id>.wav.
/// Tracks without a readable file are left out.
render::AudioSources load_sources(const meta::Project& project, const fs::path& audio_dir);

std::optional<fs::path> track_audio_path(const meta::Track& track, const fs::path& audio_dir);

}  // namespace mga::tools

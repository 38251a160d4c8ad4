#pragma once

// Shared fixtures, generators and oracles for the test binaries.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mga/container.hpp"
#include "mga/metamodel.hpp"
#include "mga/quality.hpp"
#include "mga/timecode.hpp"

namespace mga::testing {

namespace fs = std::filesystem;

fs::path fixture_path(const std::string& name);
std::string read_text(const fs::path& path);
Bytes read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, ByteView data);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

using Rng = std::mt19937_64;

/// Interleaved PCM with a deterministic pseudo-random waveform.
Bytes noise_samples(Rng& rng, std::uint64_t frames, std::uint16_t channels, std::uint16_t bits);

/// Valid container with fmt, data, optional bext and a few unknown chunks
/// (odd sizes included), in RIFF or BW64 form.
container::ContainerFile random_container(Rng& rng);

/// Valid timecode; frames and rate only when `with_frames`.
timecode::Timecode random_timecode(Rng& rng, bool with_frames);

struct ProjectShape {
  std::size_t max_segments = 12;
  std::size_t max_tracks = 3;
  int max_loi = 4;
  std::uint64_t max_duration_ms = 120'000;
  bool rich_metadata = true;  // topics, location, timestamp, extensions
};

/// Valid project: per-track segments laid end to end with random gaps.
meta::Project random_project(Rng& rng, const ProjectShape& shape = {});

/// Brute-force reference for select_by_loi: enumerates every subset,
/// keeps those that are downward-closed by LOI and form a document-order
/// prefix of their highest level, and returns the largest one within the
/// target. Empty optional when the LOI-1 content alone exceeds the target.
std::optional<std::vector<std::string>> brute_force_selection(const meta::Project& project,
                                                             std::uint64_t target_ms);

/// Great-circle distance from the chord between two unit vectors.
double chord_distance_km(double lat1, double lon1, double lat2, double lon2);

/// [{"id": ..., "fields": {"name": ["value", ...]}}]
std::vector<quality::Record> load_records(const fs::path& path);

}  // namespace mga::testing

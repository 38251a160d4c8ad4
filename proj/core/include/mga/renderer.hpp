#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mga/assembly.hpp"
#include "mga/container.hpp"
#include "mga/metamodel.hpp"

namespace mga::render {

struct RenderConfig {
  std::uint32_t crossfade_ms = 10;
  std::uint16_t output_bits = 16;  // 16 or 24
  // When false, entries whose track has no source render as silence.
  bool fail_on_missing_audio = true;
};

/// track_ref -> per-track source file
using AudioSources = std::map<std::string, container::ContainerFile, std::less<>>;

/// round(ms * rate / 1000), halves rounded up.
std::uint64_t ms_to_frames(std::uint64_t ms, std::uint32_t sample_rate) noexcept;

/// Crossfade length at each join, clamped to half of the shorter neighbour.
/// Works in whatever unit the lengths are given in.
std::uint64_t join_length(std::uint64_t crossfade, std::uint64_t left, std::uint64_t right) noexcept;

/// Exact output length in frames for a given rate.
std::uint64_t total_frames(const assembly::Edl& edl, const RenderConfig& config,
                           std::uint32_t sample_rate);

/// Output length in milliseconds, computed on the EDL alone.
ContentTime total_duration(const assembly::Edl& edl, const RenderConfig& config);

/// Cuts each entry from its track's source and joins them with
/// equal-power (sin/cos) crossfades. `embedded`, when given, is written
/// into the result's axml chunk.
container::ContainerFile render(const assembly::Edl& edl, const AudioSources& sources,
                                const RenderConfig& config,
                                const meta::Project* embedded = nullptr);

}  // namespace mga::render

#include "mga/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mga::render {

namespace {

constexpr std::uint32_t kFallbackRate = 48000;

std::int32_t load_sample(const std::uint8_t* p, unsigned bytes) noexcept {
  switch (bytes) {
    case 2: return static_cast<std::int16_t>(load_u16le(p));
    case 3: {
      std::uint32_t v = p[0] | (p[1] << 8) | (static_cast<std::uint32_t>(p[2]) << 16);
      if (v & 0x800000u) v |= 0xFF000000u;
      return static_cast<std::int32_t>(v);
    }
    default: return static_cast<std::int32_t>(load_u32le(p));
  }
}

std::int32_t rescale(std::int32_t v, unsigned from_bits, unsigned to_bits) noexcept {
  if (from_bits > to_bits) return v >> (from_bits - to_bits);
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v) << (to_bits - from_bits));
}

struct Clip {
  const container::ContainerFile* source = nullptr;  // null renders silence
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

}  // namespace

std::uint64_t ms_to_frames(std::uint64_t ms, std::uint32_t sample_rate) noexcept {
  return (ms * sample_rate + 500) / 1000;
}

std::uint64_t join_length(std::uint64_t crossfade, std::uint64_t left,
                          std::uint64_t right) noexcept {
  return std::min({crossfade, left / 2, right / 2});
}

std::uint64_t total_frames(const assembly::Edl& edl, const RenderConfig& config,
                           std::uint32_t sample_rate) {
  const std::uint64_t cf = ms_to_frames(config.crossfade_ms, sample_rate);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < edl.entries.size(); ++i) {
    const std::uint64_t len = ms_to_frames(edl.entries[i].duration.ms, sample_rate);
    total += len;
    if (i > 0)
      total -= join_length(cf, ms_to_frames(edl.entries[i - 1].duration.ms, sample_rate), len);
  }
  return total;
}

ContentTime total_duration(const assembly::Edl& edl, const RenderConfig& config) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < edl.entries.size(); ++i) {
    total += edl.entries[i].duration.ms;
    if (i > 0)
      total -= join_length(config.crossfade_ms, edl.entries[i - 1].duration.ms,
                           edl.entries[i].duration.ms);
  }
  return ContentTime{total};
}

container::ContainerFile render(const assembly::Edl& edl, const AudioSources& sources,
                                const RenderConfig& config, const meta::Project* embedded) {
  if (config.output_bits != 16 && config.output_bits != 24)
    throw Error(ErrorCode::InvalidArgument, "output_bits must be 16 or 24");

  // Format comes from the sources the EDL actually uses.
  const container::AudioInfo* format = nullptr;
  for (const auto& e : edl.entries) {
    auto it = sources.find(e.track_ref);
    if (it == sources.end()) {
      if (config.fail_on_missing_audio)
        throw Error(ErrorCode::MissingAudio, "no source audio for track '" + e.track_ref + "'");
      continue;
    }
    const auto& info = it->second.audio_info;
    if (!format) {
      format = &info;
    } else if (info.sample_rate != format->sample_rate ||
               info.channel_count != format->channel_count) {
      throw Error(ErrorCode::RateMismatch,
                  "track '" + e.track_ref + "' is " + std::to_string(info.sample_rate) + " Hz/" +
                      std::to_string(info.channel_count) + " ch, expected " +
                      std::to_string(format->sample_rate) + " Hz/" +
                      std::to_string(format->channel_count) + " ch");
    }
  }
  if (!format && !edl.entries.empty())
    throw Error(ErrorCode::MissingAudio, "none of the EDL's tracks has source audio");
  if (!format && !sources.empty()) format = &sources.begin()->second.audio_info;
  const std::uint32_t rate = format ? format->sample_rate : kFallbackRate;
  const unsigned channels = format ? format->channel_count : 1;

  std::vector<Clip> clips;
  for (const auto& e : edl.entries) {
    Clip clip;
    clip.offset = ms_to_frames(e.source_start.ms, rate);
    clip.length = ms_to_frames(e.duration.ms, rate);
    if (auto it = sources.find(e.track_ref); it != sources.end()) {
      clip.source = &it->second;
      const auto& data = *clip.source->find(container::kData);
      const std::uint64_t available = data.payload.size() / clip.source->audio_info.block_align();
      if (clip.offset + clip.length > available)
        throw Error(ErrorCode::RangeOutOfBounds,
                    "entry '" + e.segment_id + "' needs frames [" + std::to_string(clip.offset) +
                        ", " + std::to_string(clip.offset + clip.length) + ") of track '" +
                        e.track_ref + "', which has " + std::to_string(available));
    }
    clips.push_back(clip);
  }

  const unsigned out_bits = config.output_bits;
  const std::uint64_t cf = ms_to_frames(config.crossfade_ms, rate);
  std::vector<std::int32_t> out(total_frames(edl, config, rate) * channels, 0);

  std::uint64_t pos = 0;  // frame where the next clip would start without overlap
  for (std::size_t k = 0; k < clips.size(); ++k) {
    const Clip& clip = clips[k];
    const std::uint64_t fade = k == 0 ? 0 : join_length(cf, clips[k - 1].length, clip.length);
    const std::uint64_t begin = pos - fade;
    const std::uint8_t* src = nullptr;
    unsigned in_bytes = 0;
    unsigned in_bits = 0;
    if (clip.source) {
      in_bits = clip.source->audio_info.bits_per_sample;
      in_bytes = in_bits / 8;
      src = clip.source->find(container::kData)->payload.data() +
            clip.offset * clip.source->audio_info.block_align();
    }
    for (std::uint64_t i = 0; i < clip.length; ++i) {
      for (unsigned c = 0; c < channels; ++c) {
        const std::int32_t v =
            src ? rescale(load_sample(src + (i * channels + c) * in_bytes, in_bytes), in_bits,
                          out_bits)
                : 0;
        std::int32_t& dst = out[(begin + i) * channels + c];
        if (i < fade) {
          const double theta = std::numbers::pi / 2 * (static_cast<double>(i) + 0.5) /
                               static_cast<double>(fade);
          const double lo = -std::ldexp(1.0, static_cast<int>(out_bits) - 1);
          const double hi = std::ldexp(1.0, static_cast<int>(out_bits) - 1) - 1;
          const double mixed = dst * std::cos(theta) + v * std::sin(theta);
          dst = static_cast<std::int32_t>(std::clamp(std::round(mixed), lo, hi));
        } else {
          dst = v;
        }
      }
    }
    pos = begin + clip.length;
  }

  Bytes pcm;
  const unsigned out_bytes = out_bits / 8;
  pcm.reserve(out.size() * out_bytes);
  for (std::int32_t v : out)
    for (unsigned b = 0; b < out_bytes; ++b) pcm.push_back(static_cast<std::uint8_t>(v >> (8 * b)));

  auto file = container::make_pcm(rate, static_cast<std::uint16_t>(channels),
                                  static_cast<std::uint16_t>(out_bits), std::move(pcm));
  if (embedded) file = meta::embed(*embedded, std::move(file), {.replace_foreign = true});
  return file;
}

}  // namespace mga::render

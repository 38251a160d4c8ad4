#pragma once

// Chunk-level access to RIFF/WAVE, RF64 and BW64 files.
//
// A ContainerFile keeps every chunk in file order, including ones this
// library does not understand, so that parse/write is lossless. The
// derived fields (audio_info, total_content_size and the ds64 payload of
// 64-bit files) are recomputed by refresh() after any edit.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mga/byte_io.hpp"

namespace mga::container {

enum class FormatTag { riff, rf64, bw64 };

std::string_view to_string(FormatTag tag) noexcept;

/// Four-character chunk identifier. Case-sensitive.
class FourCC {
 public:
  constexpr FourCC() = default;
  constexpr FourCC(const char (&s)[5]) : chars_{s[0], s[1], s[2], s[3]} {}
  static FourCC from_bytes(const std::uint8_t* p) noexcept;

  std::string str() const { return std::string(chars_.data(), 4); }
  const std::array<char, 4>& chars() const noexcept { return chars_; }

  auto operator<=>(const FourCC&) const = default;

 private:
  std::array<char, 4> chars_{' ', ' ', ' ', ' '};
};

inline constexpr FourCC kFmt{"fmt "};
inline constexpr FourCC kData{"data"};
inline constexpr FourCC kDs64{"ds64"};
inline constexpr FourCC kBext{"bext"};
inline constexpr FourCC kAxml{"axml"};

struct Chunk {
  FourCC id;
  Bytes payload;
  // Equals payload.size() except for a data chunk read in truncated mode.
  std::uint64_t declared_size = 0;

  static Chunk make(FourCC id, Bytes payload);
  bool is_complete() const noexcept { return payload.size() == declared_size; }
  bool operator==(const Chunk&) const = default;
};

struct AudioInfo {
  std::uint32_t sample_rate = 0;
  std::uint16_t channel_count = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint64_t frame_count = 0;

  std::uint32_t block_align() const noexcept {
    return static_cast<std::uint32_t>(channel_count) * (bits_per_sample / 8u);
  }
  bool operator==(const AudioInfo&) const = default;
};

struct ContainerFile {
  FormatTag format_tag = FormatTag::riff;
  std::vector<Chunk> chunks;
  AudioInfo audio_info;
  // Size of the RIFF form: everything after the 8-byte outer header.
  std::uint64_t total_content_size = 0;

  const Chunk* find(FourCC id) const noexcept;
  Chunk* find(FourCC id) noexcept;
  bool operator==(const ContainerFile&) const = default;
};

/// Location of a chunk header in the serialized stream.
struct ChunkLocation {
  FourCC id;
  std::uint64_t size = 0;
  std::uint64_t offset = 0;
};

struct ParseOptions {
  // Accept a data chunk whose payload is cut short by end-of-stream. Used
  // for header-level inspection of very large files.
  bool allow_truncated_data = false;
};

struct WriteOptions {
  // Force an output form. RIFF fails with OversizeForRiff when content does
  // not fit; BW64 upgrades a small RIFF file; unset keeps the file's own
  // form and upgrades only when the size demands it.
  std::optional<FormatTag> pinned;
  bool allow_truncated_data = false;
};

inline constexpr std::uint32_t kSizePlaceholder = 0xFFFFFFFFu;

/// RIFF iff the content is below the 32-bit all-ones sentinel, else BW64.
FormatTag select_format(std::uint64_t total_content_size) noexcept;

ContainerFile parse_container(ByteView bytes, const ParseOptions& options = {});

Bytes write_container(const ContainerFile& file, const WriteOptions& options = {});

/// Re-derives audio_info, total_content_size and the ds64 chunk from the
/// chunk list, inserting ds64 for 64-bit forms and removing it for RIFF.
/// Throws MalformedContainer when structural invariants do not hold.
void refresh(ContainerFile& file);

/// Copy of `file` in BW64 form with a ds64 chunk in front.
ContainerFile upgrade_to_bw64(ContainerFile file);

/// Builds a PCM WAVE file around interleaved little-endian sample bytes.
ContainerFile make_pcm(std::uint32_t sample_rate, std::uint16_t channel_count,
                       std::uint16_t bits_per_sample, Bytes samples);

/// Chunk headers as they will appear in write_container(file).
std::vector<ChunkLocation> chunk_layout(const ContainerFile& file);

// bext (EBU Tech 3285 v2). Fixed-width text fields are NUL-padded.

inline constexpr std::size_t kBextDescriptionSize = 256;
inline constexpr std::size_t kBextOriginatorSize = 32;
inline constexpr std::size_t kBextOriginatorReferenceSize = 32;
inline constexpr std::size_t kBextDateSize = 10;
inline constexpr std::size_t kBextTimeSize = 8;
inline constexpr std::size_t kBextUmidSize = 64;
inline constexpr std::size_t kBextLoudnessSize = 10;
inline constexpr std::size_t kBextReservedSize = 180;
inline constexpr std::size_t kBextFixedSize =
    kBextDescriptionSize + kBextOriginatorSize + kBextOriginatorReferenceSize +
    kBextDateSize + kBextTimeSize + 8 /* time reference */ + 2 /* version */ +
    kBextUmidSize + kBextLoudnessSize + kBextReservedSize;

struct BextInfo {
  std::string description;
  std::string originator;
  std::string originator_reference;
  std::string origination_date;  // YYYY-MM-DD
  std::string origination_time;  // HH:MM:SS
  std::uint64_t time_reference = 0;
  std::string coding_history;

  // Carried through untouched.
  std::uint16_t version = 2;
  std::array<std::uint8_t, kBextUmidSize> umid{};
  std::array<std::uint8_t, kBextLoudnessSize> loudness{};
  std::array<std::uint8_t, kBextReservedSize> reserved{};

  bool operator==(const BextInfo&) const = default;
};

std::optional<BextInfo> read_bext(const ContainerFile& file);
ContainerFile write_bext(ContainerFile file, const BextInfo& info);

std::optional<std::string> read_axml(const ContainerFile& file);
ContainerFile write_axml(ContainerFile file, std::string_view xml);

}  // namespace mga::container

#include "mga/container.hpp"

#include <algorithm>
#include <cstdio>

#include "mga/error.hpp"

namespace mga::container {

namespace {

constexpr FourCC kRiff{"RIFF"};
constexpr FourCC kRf64{"RF64"};
constexpr FourCC kBw64{"BW64"};
constexpr FourCC kWave{"WAVE"};

constexpr std::size_t kDs64BaseSize = 28;
constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedContainer, what);
}

bool is_64bit(FormatTag tag) noexcept { return tag != FormatTag::riff; }

std::uint64_t padded(std::uint64_t size) noexcept { return size + (size & 1u); }

struct TableEntry {
  FourCC id;
  std::uint64_t size;
};

AudioInfo decode_fmt(const Chunk& fmt) {
  const Bytes& p = fmt.payload;
  if (p.size() < 16) malformed("fmt chunk shorter than 16 bytes");
  const std::uint16_t code = load_u16le(p.data());
  AudioInfo info;
  info.channel_count = load_u16le(p.data() + 2);
  info.sample_rate = load_u32le(p.data() + 4);
  info.bits_per_sample = load_u16le(p.data() + 14);

  bool pcm = code == kFormatPcm;
  if (code == kFormatExtensible) {
    if (p.size() < 40) malformed("extensible fmt chunk shorter than 40 bytes");
    pcm = load_u16le(p.data() + 24) == kFormatPcm;
  }
  if (!pcm) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "format code 0x%04X is not integer PCM", code);
    throw Error(ErrorCode::UnsupportedEncoding, buf);
  }
  if (info.bits_per_sample != 16 && info.bits_per_sample != 24 &&
      info.bits_per_sample != 32) {
    throw Error(ErrorCode::UnsupportedEncoding,
                std::to_string(info.bits_per_sample) + "-bit samples not supported");
  }
  if (info.channel_count == 0) malformed("fmt declares zero channels");
  if (info.sample_rate == 0) malformed("fmt declares a zero sample rate");
  return info;
}

std::vector<TableEntry> oversize_table(const std::vector<Chunk>& chunks) {
  std::vector<TableEntry> table;
  for (const Chunk& c : chunks) {
    if (c.id == kDs64 || c.id == kData) continue;
    if (c.declared_size >= kSizePlaceholder) table.push_back({c.id, c.declared_size});
  }
  return table;
}

}  // namespace

std::string_view to_string(FormatTag tag) noexcept {
  switch (tag) {
    case FormatTag::riff: return "RIFF";
    case FormatTag::rf64: return "RF64";
    case FormatTag::bw64: return "BW64";
  }
  return "?";
}

FourCC FourCC::from_bytes(const std::uint8_t* p) noexcept {
  FourCC f;
  for (int i = 0; i < 4; ++i) f.chars_[i] = static_cast<char>(p[i]);
  return f;
}

Chunk Chunk::make(FourCC id, Bytes payload) {
  Chunk c;
  c.id = id;
  c.declared_size = payload.size();
  c.payload = std::move(payload);
  return c;
}

const Chunk* ContainerFile::find(FourCC id) const noexcept {
  auto it = std::find_if(chunks.begin(), chunks.end(),
                         [&](const Chunk& c) { return c.id == id; });
  return it == chunks.end() ? nullptr : &*it;
}

Chunk* ContainerFile::find(FourCC id) noexcept {
  auto it = std::find_if(chunks.begin(), chunks.end(),
                         [&](const Chunk& c) { return c.id == id; });
  return it == chunks.end() ? nullptr : &*it;
}

FormatTag select_format(std::uint64_t total_content_size) noexcept {
  return total_content_size < kSizePlaceholder ? FormatTag::riff : FormatTag::bw64;
}

void refresh(ContainerFile& file) {
  auto count = [&](FourCC id) {
    return std::count_if(file.chunks.begin(), file.chunks.end(),
                         [&](const Chunk& c) { return c.id == id; });
  };
  if (count(kFmt) != 1)
    malformed(count(kFmt) == 0 ? "missing fmt chunk" : "duplicate fmt chunk");
  if (count(kData) != 1)
    malformed(count(kData) == 0 ? "missing data chunk" : "duplicate data chunk");
  if (count(kBext) > 1) malformed("duplicate bext chunk");
  if (count(kAxml) > 1) malformed("duplicate axml chunk");
  if (count(kDs64) > 1) malformed("duplicate ds64 chunk");

  AudioInfo info = decode_fmt(*file.find(kFmt));
  // Copied out: inserting ds64 below moves the chunks.
  const std::uint64_t data_size = file.find(kData)->declared_size;
  if (data_size % info.block_align() != 0)
    malformed("data size is not a whole number of frames");
  info.frame_count = data_size / info.block_align();
  file.audio_info = info;

  auto ds64 = std::find_if(file.chunks.begin(), file.chunks.end(),
                           [](const Chunk& c) { return c.id == kDs64; });
  if (!is_64bit(file.format_tag)) {
    if (ds64 != file.chunks.end()) file.chunks.erase(ds64);
  } else if (ds64 == file.chunks.end()) {
    file.chunks.insert(file.chunks.begin(), Chunk::make(kDs64, {}));
  } else if (ds64 != file.chunks.begin()) {
    malformed("ds64 chunk is not the first chunk");
  }

  std::vector<TableEntry> table;
  if (is_64bit(file.format_tag)) {
    table = oversize_table(file.chunks);
    Chunk& head = file.chunks.front();
    head.payload.assign(kDs64BaseSize + 12 * table.size(), 0);
    head.declared_size = head.payload.size();
  }

  std::uint64_t total = 4;
  for (const Chunk& c : file.chunks) total += 8 + padded(c.declared_size);
  file.total_content_size = total;

  if (is_64bit(file.format_tag)) {
    std::uint8_t* p = file.chunks.front().payload.data();
    store_u64le(p, total);
    store_u64le(p + 8, data_size);
    store_u64le(p + 16, info.frame_count);
    store_u32le(p + 24, static_cast<std::uint32_t>(table.size()));
    p += kDs64BaseSize;
    for (const TableEntry& e : table) {
      std::copy(e.id.chars().begin(), e.id.chars().end(), p);
      store_u64le(p + 4, e.size);
      p += 12;
    }
  }
}

ContainerFile parse_container(ByteView bytes, const ParseOptions& options) {
  const std::size_t n = bytes.size();
  const std::uint8_t* b = bytes.data();
  if (n < 12) malformed("stream shorter than the 12-byte RIFF header");

  ContainerFile file;
  const FourCC magic = FourCC::from_bytes(b);
  if (magic == kRiff) {
    file.format_tag = FormatTag::riff;
  } else if (magic == kRf64) {
    file.format_tag = FormatTag::rf64;
  } else if (magic == kBw64) {
    file.format_tag = FormatTag::bw64;
  } else {
    malformed("bad magic '" + magic.str() + "'");
  }
  if (FourCC::from_bytes(b + 8) != kWave) malformed("form type is not WAVE");

  std::uint64_t form_size = load_u32le(b + 4);
  std::uint64_t data_size64 = 0;
  std::vector<TableEntry> table;
  if (is_64bit(file.format_tag)) {
    if (n < 20 || FourCC::from_bytes(b + 12) != kDs64)
      malformed("64-bit file without a leading ds64 chunk");
    const std::uint32_t ds64_size = load_u32le(b + 16);
    if (ds64_size < kDs64BaseSize || n < 20 + std::size_t{ds64_size})
      malformed("ds64 chunk truncated");
    const std::uint8_t* d = b + 20;
    form_size = load_u64le(d);
    data_size64 = load_u64le(d + 8);
    const std::uint32_t entries = load_u32le(d + 24);
    if (kDs64BaseSize + std::uint64_t{entries} * 12 > ds64_size)
      malformed("ds64 table larger than its chunk");
    for (std::uint32_t i = 0; i < entries; ++i) {
      const std::uint8_t* e = d + kDs64BaseSize + 12 * i;
      table.push_back({FourCC::from_bytes(e), load_u64le(e + 4)});
    }
  }

  const std::uint64_t end = std::min<std::uint64_t>(n, form_size + 8);
  std::uint64_t pos = 12;
  while (pos < end) {
    if (end - pos < 8) malformed("truncated chunk header at offset " + std::to_string(pos));
    Chunk chunk;
    chunk.id = FourCC::from_bytes(b + pos);
    const std::uint32_t size32 = load_u32le(b + pos + 4);
    std::uint64_t size = size32;
    if (is_64bit(file.format_tag) && size32 == kSizePlaceholder) {
      if (chunk.id == kData) {
        size = data_size64;
      } else {
        auto it = std::find_if(table.begin(), table.end(),
                               [&](const TableEntry& e) { return e.id == chunk.id; });
        if (it == table.end())
          malformed("chunk '" + chunk.id.str() + "' has a placeholder size but no ds64 entry");
        size = it->size;
        table.erase(it);
      }
    }
    chunk.declared_size = size;
    const std::uint64_t start = pos + 8;
    const std::uint64_t available = end - start;
    if (size > available) {
      if (!(options.allow_truncated_data && chunk.id == kData))
        malformed("chunk '" + chunk.id.str() + "' truncated");
      chunk.payload.assign(b + start, b + end);
      file.chunks.push_back(std::move(chunk));
      break;
    }
    chunk.payload.assign(b + start, b + start + size);
    file.chunks.push_back(std::move(chunk));
    pos = start + padded(size);
  }

  refresh(file);
  return file;
}

Bytes write_container(const ContainerFile& file, const WriteOptions& options) {
  ContainerFile f = file;
  refresh(f);

  FormatTag target = f.format_tag;
  if (options.pinned) {
    target = *options.pinned == FormatTag::riff ? FormatTag::riff : FormatTag::bw64;
  } else if (f.format_tag == FormatTag::rf64) {
    target = FormatTag::bw64;
  } else if (f.format_tag == FormatTag::riff &&
             select_format(f.total_content_size) == FormatTag::bw64) {
    target = FormatTag::bw64;
  }
  if (target != f.format_tag) {
    f.format_tag = target;
    refresh(f);
  }
  if (target == FormatTag::riff && select_format(f.total_content_size) != FormatTag::riff) {
    throw Error(ErrorCode::OversizeForRiff,
                "content of " + std::to_string(f.total_content_size) +
                    " bytes does not fit a 32-bit RIFF file");
  }

  for (std::size_t i = 0; i < f.chunks.size(); ++i) {
    if (!f.chunks[i].is_complete() &&
        !(options.allow_truncated_data && f.chunks[i].id == kData && i + 1 == f.chunks.size()))
      malformed("chunk '" + f.chunks[i].id.str() + "' payload shorter than its declared size");
  }

  const bool wide = is_64bit(target);
  Bytes out;
  std::uint64_t reserve = 12;
  for (const Chunk& c : f.chunks) reserve += 9 + c.payload.size();
  out.reserve(reserve);

  const FourCC magic = wide ? kBw64 : kRiff;
  out.insert(out.end(), magic.chars().begin(), magic.chars().end());
  append_u32le(out, wide ? kSizePlaceholder : static_cast<std::uint32_t>(f.total_content_size));
  out.insert(out.end(), kWave.chars().begin(), kWave.chars().end());

  for (const Chunk& c : f.chunks) {
    out.insert(out.end(), c.id.chars().begin(), c.id.chars().end());
    const bool placeholder = wide && (c.id == kData || c.declared_size >= kSizePlaceholder);
    append_u32le(out, placeholder ? kSizePlaceholder : static_cast<std::uint32_t>(c.declared_size));
    out.insert(out.end(), c.payload.begin(), c.payload.end());
    if (c.is_complete() && (c.declared_size & 1u)) out.push_back(0);
  }
  return out;
}

ContainerFile upgrade_to_bw64(ContainerFile file) {
  file.format_tag = FormatTag::bw64;
  refresh(file);
  return file;
}

ContainerFile make_pcm(std::uint32_t sample_rate, std::uint16_t channel_count,
                       std::uint16_t bits_per_sample, Bytes samples) {
  Bytes fmt;
  const std::uint16_t block_align = channel_count * (bits_per_sample / 8);
  append_u16le(fmt, kFormatPcm);
  append_u16le(fmt, channel_count);
  append_u32le(fmt, sample_rate);
  append_u32le(fmt, sample_rate * block_align);
  append_u16le(fmt, block_align);
  append_u16le(fmt, bits_per_sample);

  ContainerFile file;
  file.chunks.push_back(Chunk::make(kFmt, std::move(fmt)));
  file.chunks.push_back(Chunk::make(kData, std::move(samples)));
  refresh(file);
  if (select_format(file.total_content_size) != FormatTag::riff) {
    file.format_tag = FormatTag::bw64;
    refresh(file);
  }
  return file;
}

std::vector<ChunkLocation> chunk_layout(const ContainerFile& file) {
  std::vector<ChunkLocation> out;
  std::uint64_t pos = 12;
  for (const Chunk& c : file.chunks) {
    out.push_back({c.id, c.declared_size, pos});
    pos += 8 + padded(c.declared_size);
  }
  return out;
}

}  // namespace mga::container

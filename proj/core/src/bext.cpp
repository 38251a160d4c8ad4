#include <algorithm>

#include "mga/container.hpp"
#include "mga/error.hpp"

namespace mga::container {

namespace {

std::string read_fixed(const std::uint8_t*& p, std::size_t width) {
  const auto* end = std::find(p, p + width, std::uint8_t{0});
  std::string s(p, end);
  p += width;
  return s;
}

void write_fixed(Bytes& out, const std::string& s, std::size_t width) {
  out.insert(out.end(), s.begin(), s.end());
  out.insert(out.end(), width - s.size(), 0);
}

bool printable(char c) { return c >= 0x20 && c <= 0x7E; }

void check_text(const std::string& value, std::size_t width, const char* field) {
  if (!std::all_of(value.begin(), value.end(), printable))
    throw Error(ErrorCode::NonAsciiText,
                std::string("bext ") + field + " contains non-printable or non-ASCII bytes");
  if (value.size() > width) {
    throw Error(field == std::string("description") ? ErrorCode::DescriptionTooLong
                                                     : ErrorCode::FieldTooLong,
                std::string("bext ") + field + " is " + std::to_string(value.size()) +
                    " bytes, limit is " + std::to_string(width));
  }
}

std::vector<Chunk>::iterator insert_position(ContainerFile& file, FourCC id) {
  auto existing = std::find_if(file.chunks.begin(), file.chunks.end(),
                               [&](const Chunk& c) { return c.id == id; });
  if (existing != file.chunks.end()) return existing;
  if (id == kAxml) return file.chunks.end();
  // bext goes ahead of fmt, behind a leading ds64.
  auto it = file.chunks.begin();
  if (it != file.chunks.end() && it->id == kDs64) ++it;
  return it;
}

void put_chunk(ContainerFile& file, FourCC id, Bytes payload) {
  auto it = insert_position(file, id);
  if (it != file.chunks.end() && it->id == id) {
    *it = Chunk::make(id, std::move(payload));
  } else {
    file.chunks.insert(it, Chunk::make(id, std::move(payload)));
  }
  refresh(file);
}

}  // namespace

std::optional<BextInfo> read_bext(const ContainerFile& file) {
  const Chunk* chunk = file.find(kBext);
  if (!chunk) return std::nullopt;
  if (chunk->payload.size() < kBextFixedSize) {
    throw Error(ErrorCode::MalformedChunk,
                "bext payload is " + std::to_string(chunk->payload.size()) +
                    " bytes, fixed region needs " + std::to_string(kBextFixedSize));
  }
  const std::uint8_t* p = chunk->payload.data();
  BextInfo info;
  info.description = read_fixed(p, kBextDescriptionSize);
  info.originator = read_fixed(p, kBextOriginatorSize);
  info.originator_reference = read_fixed(p, kBextOriginatorReferenceSize);
  info.origination_date = read_fixed(p, kBextDateSize);
  info.origination_time = read_fixed(p, kBextTimeSize);
  info.time_reference = load_u64le(p);
  p += 8;
  info.version = load_u16le(p);
  p += 2;
  std::copy_n(p, kBextUmidSize, info.umid.begin());
  p += kBextUmidSize;
  std::copy_n(p, kBextLoudnessSize, info.loudness.begin());
  p += kBextLoudnessSize;
  std::copy_n(p, kBextReservedSize, info.reserved.begin());
  p += kBextReservedSize;
  const auto* end = chunk->payload.data() + chunk->payload.size();
  info.coding_history.assign(p, std::find(p, end, std::uint8_t{0}));
  return info;
}

ContainerFile write_bext(ContainerFile file, const BextInfo& info) {
  check_text(info.description, kBextDescriptionSize, "description");
  check_text(info.originator, kBextOriginatorSize, "originator");
  check_text(info.originator_reference, kBextOriginatorReferenceSize, "originator_reference");
  check_text(info.origination_date, kBextDateSize, "origination_date");
  check_text(info.origination_time, kBextTimeSize, "origination_time");
  // Coding history lines are CR/LF terminated.
  if (!std::all_of(info.coding_history.begin(), info.coding_history.end(),
                   [](char c) { return printable(c) || c == '\r' || c == '\n'; }))
    throw Error(ErrorCode::NonAsciiText, "bext coding_history contains non-ASCII bytes");

  Bytes payload;
  payload.reserve(kBextFixedSize + info.coding_history.size());
  write_fixed(payload, info.description, kBextDescriptionSize);
  write_fixed(payload, info.originator, kBextOriginatorSize);
  write_fixed(payload, info.originator_reference, kBextOriginatorReferenceSize);
  write_fixed(payload, info.origination_date, kBextDateSize);
  write_fixed(payload, info.origination_time, kBextTimeSize);
  append_u64le(payload, info.time_reference);
  append_u16le(payload, info.version);
  payload.insert(payload.end(), info.umid.begin(), info.umid.end());
  payload.insert(payload.end(), info.loudness.begin(), info.loudness.end());
  payload.insert(payload.end(), info.reserved.begin(), info.reserved.end());
  payload.insert(payload.end(), info.coding_history.begin(), info.coding_history.end());

  put_chunk(file, kBext, std::move(payload));
  return file;
}

std::optional<std::string> read_axml(const ContainerFile& file) {
  const Chunk* chunk = file.find(kAxml);
  if (!chunk) return std::nullopt;
  std::string text = mga::to_string(ByteView(chunk->payload));
  if (!is_valid_utf8(text)) throw Error(ErrorCode::InvalidUtf8, "axml payload is not valid UTF-8");
  return text;
}

ContainerFile write_axml(ContainerFile file, std::string_view xml) {
  put_chunk(file, kAxml, to_bytes(xml));
  return file;
}

}  // namespace mga::container

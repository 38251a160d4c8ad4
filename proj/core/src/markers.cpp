#include <algorithm>
#include <cctype>
#include <cstring>

#include "mga/error.hpp"
#include "mga/timecode.hpp"

namespace mga::timecode {

namespace {

struct Line {
  std::string_view text;
  std::size_t number;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with(ByteView b, std::initializer_list<std::uint8_t> sig) {
  return b.size() >= sig.size() && std::equal(sig.begin(), sig.end(), b.begin());
}

void reject_binary(ByteView bytes) {
  if (starts_with(bytes, {0x50, 0x4B, 0x03, 0x04}))
    throw Error(ErrorCode::UnsupportedFormat, "xlsx/docx not supported");
  if (starts_with(bytes, {0xD0, 0xCF, 0x11, 0xE0, 0xA1, 0xB1, 0x1A, 0xE1}))
    throw Error(ErrorCode::UnsupportedFormat, "xls/doc not supported");
  if (starts_with(bytes, {'%', 'P', 'D', 'F'}))
    throw Error(ErrorCode::UnsupportedFormat, "pdf not supported");
  if (std::find(bytes.begin(), bytes.end(), std::uint8_t{0}) != bytes.end())
    throw Error(ErrorCode::UnsupportedFormat, "binary input not supported");
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back({line, number});
    ++number;
    start = nl + 1;
  }
  return lines;
}

// RFC 4180 style: quoted cells may contain the delimiter and "" escapes.
std::vector<std::string> split_cells(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"' && trim(cell).empty()) {
      cell.clear();
      quoted = true;
    } else if (c == delimiter) {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.emplace_back(trim(cell));
  return cells;
}

bool looks_like_timecode(std::string_view text, std::optional<unsigned> frame_rate) {
  try {
    parse_timecode(text, frame_rate);
    return true;
  } catch (const Error& e) {
    return e.code() == ErrorCode::MissingFrameRate;
  }
}

[[noreturn]] void bad_line(std::size_t number, const std::string& why) {
  throw Error(ErrorCode::MalformedMarkerLine, "line " + std::to_string(number) + ": " + why);
}

std::vector<RawMarker> read_delimited(const std::vector<Line>& lines, char delimiter,
                                      bool allow_swap, std::optional<unsigned> frame_rate) {
  std::size_t label_col = 0;
  std::size_t tc_col = 1;
  std::size_t first = 0;

  const auto head = split_cells(lines.front().text, delimiter);
  if (allow_swap && !head.empty() && looks_like_timecode(head[0], frame_rate) &&
      (head.size() < 2 || !looks_like_timecode(head[1], frame_rate))) {
    std::swap(label_col, tc_col);
  } else if (head.size() < 2 || !looks_like_timecode(head[1], frame_rate)) {
    first = 1;  // header row
    if (allow_swap && lines.size() > 1) {
      const auto row = split_cells(lines[1].text, delimiter);
      if (!row.empty() && looks_like_timecode(row[0], frame_rate) &&
          (row.size() < 2 || !looks_like_timecode(row[1], frame_rate)))
        std::swap(label_col, tc_col);
    }
  }

  std::vector<RawMarker> markers;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto cells = split_cells(lines[i].text, delimiter);
    if (cells.size() < 2) bad_line(lines[i].number, "expected a label and a timecode column");
    RawMarker m;
    m.label = cells[label_col];
    m.timecode_text = cells[tc_col];
    m.line_number = lines[i].number;
    if (m.timecode_text.empty()) bad_line(m.line_number, "empty timecode");
    markers.push_back(std::move(m));
  }
  return markers;
}

std::vector<RawMarker> read_text(const std::vector<Line>& lines) {
  std::vector<RawMarker> markers;
  for (const Line& line : lines) {
    const std::string_view body = trim(line.text);
    auto split = std::find_if(body.begin(), body.end(),
                              [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    RawMarker m;
    m.timecode_text.assign(body.begin(), split);
    m.label = std::string(trim(std::string_view(split, body.end())));
    m.line_number = line.number;
    markers.push_back(std::move(m));
  }
  return markers;
}

}  // namespace

std::optional<MarkerFormat> marker_format_from_name(std::string_view name) {
  const auto dot = name.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  std::string ext(name.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "csv") return MarkerFormat::csv;
  if (ext == "tsv" || ext == "tab") return MarkerFormat::tsv;
  if (ext == "txt") return MarkerFormat::txt;
  return std::nullopt;
}

std::vector<RawMarker> ingest_marker_file(ByteView bytes, std::optional<MarkerFormat> format_hint,
                                          std::optional<unsigned> frame_rate) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyFile, "marker file is empty");
  reject_binary(bytes);

  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  if (!is_valid_utf8(text))
    throw Error(ErrorCode::UnsupportedFormat, "marker file is not UTF-8 text");

  const std::vector<Line> lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, "marker file has no content lines");

  std::vector<RawMarker> markers;
  if (format_hint) {
    switch (*format_hint) {
      case MarkerFormat::csv: markers = read_delimited(lines, ',', false, frame_rate); break;
      case MarkerFormat::tsv: markers = read_delimited(lines, '\t', false, frame_rate); break;
      case MarkerFormat::txt: markers = read_text(lines); break;
    }
  } else {
    const std::string_view first = lines.front().text;
    if (first.find('\t') != std::string_view::npos) {
      markers = read_delimited(lines, '\t', true, frame_rate);
    } else if (first.find(',') != std::string_view::npos) {
      markers = read_delimited(lines, ',', true, frame_rate);
    } else {
      markers = read_text(lines);
    }
  }
  if (markers.empty()) throw Error(ErrorCode::EmptyFile, "marker file contains only a header");
  return markers;
}

}  // namespace mga::timecode

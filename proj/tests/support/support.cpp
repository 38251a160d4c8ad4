#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef MGA_FIXTURE_DIR
#error "MGA_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace mga::testing {

fs::path fixture_path(const std::string& name) { return fs::path(MGA_FIXTURE_DIR) / name; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Bytes read_bytes(const fs::path& path) {
  const std::string text = read_text(path);
  return Bytes(text.begin(), text.end());
}

void write_bytes(const fs::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    auto candidate = fs::temp_directory_path() / ("mga-test-" + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temp directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Bytes noise_samples(Rng& rng, std::uint64_t frames, std::uint16_t channels, std::uint16_t bits) {
  const std::size_t width = bits / 8;
  Bytes out(frames * channels * width);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

namespace {

template <typename T>
T pick(Rng& rng, std::initializer_list<T> values) {
  std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
  return *(values.begin() + d(rng));
}

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(uniform(rng, 0, 255));
  return out;
}

std::string ascii_text(Rng& rng, std::size_t max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -_.,:;/()";
  std::string s(uniform(rng, 0, max_len), ' ');
  for (auto& c : s) c = alphabet[uniform(rng, 0, alphabet.size() - 1)];
  return s;
}

/// Labels that stress XML escaping and UTF-8.
std::string label_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "Lead",  "Body", "Tail", "Interview", "<tag>", "A & B", "\"quoted\"", "it's",
      "Grüße", "東京", "Ωmega", "tab\there", "  padded  ", "line\nbreak", "]]>", "x"};
  std::string out;
  const auto n = uniform(rng, 1, 3);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += pieces[uniform(rng, 0, pieces.size() - 1)];
  }
  return out;
}

std::string fourcc_text(Rng& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  for (;;) {
    std::string s(4, ' ');
    for (auto& c : s) c = alphabet[uniform(rng, 0, alphabet.size() - 1)];
    if (s != "fmt " && s != "data" && s != "ds64" && s != "bext" && s != "axml") return s;
  }
}

container::FourCC to_fourcc(const std::string& s) {
  return container::FourCC::from_bytes(reinterpret_cast<const std::uint8_t*>(s.data()));
}

}  // namespace

container::ContainerFile random_container(Rng& rng) {
  using namespace container;
  const std::uint16_t channels = static_cast<std::uint16_t>(uniform(rng, 1, 6));
  const std::uint16_t bits = pick<std::uint16_t>(rng, {16, 24, 32});
  const std::uint32_t rate = pick<std::uint32_t>(rng, {8000, 22050, 44100, 48000, 96000});
  const std::uint64_t frames = uniform(rng, 0, 700);

  ContainerFile pcm = make_pcm(rate, channels, bits, noise_samples(rng, frames, channels, bits));
  std::vector<Chunk> extras;
  const auto unknown = uniform(rng, 0, 4);
  for (std::uint64_t i = 0; i < unknown; ++i) {
    const std::string id =
        coin(rng) ? std::string(pick<const char*>(rng, {"quux", "LIST", "junk", "cue "}))
                  : fourcc_text(rng);
    extras.push_back(Chunk::make(to_fourcc(id), random_bytes(rng, uniform(rng, 0, 301))));
  }
  if (coin(rng, 0.4)) {
    BextInfo info;
    info.description = ascii_text(rng, 256);
    info.originator = ascii_text(rng, 32);
    info.originator_reference = ascii_text(rng, 32);
    info.origination_date = "2024-05-01";
    info.origination_time = "12:30:00";
    info.time_reference = uniform(rng, 0, UINT64_MAX);
    info.version = 2;
    for (auto& b : info.umid) b = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    for (auto& b : info.loudness) b = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    info.coding_history = coin(rng) ? "A=PCM,F=48000,W=24,M=stereo\r\n" : "";
    pcm = write_bext(std::move(pcm), info);
  }

  // Scatter unknown chunks between the existing ones.
  ContainerFile file;
  file.format_tag = coin(rng) ? FormatTag::riff : FormatTag::bw64;
  file.chunks = pcm.chunks;
  for (auto& c : extras) {
    const auto pos = uniform(rng, 0, file.chunks.size());
    file.chunks.insert(file.chunks.begin() + static_cast<std::ptrdiff_t>(pos), std::move(c));
  }
  if (coin(rng, 0.3)) file = meta::embed(random_project(rng, {.max_segments = 4}), file);
  refresh(file);
  return file;
}

timecode::Timecode random_timecode(Rng& rng, bool with_frames) {
  timecode::Timecode tc;
  tc.hours = static_cast<unsigned>(uniform(rng, 0, 23));
  tc.minutes = static_cast<unsigned>(uniform(rng, 0, 59));
  tc.seconds = static_cast<unsigned>(uniform(rng, 0, 59));
  if (with_frames) {
    const unsigned rate = pick<unsigned>(rng, {24, 25, 30, 50, 60});
    tc.frame_rate = rate;
    tc.frames = static_cast<unsigned>(uniform(rng, 0, rate - 1));
  }
  return tc;
}

meta::Project random_project(Rng& rng, const ProjectShape& shape) {
  meta::Project p;
  p.programme.id = "prog-" + std::to_string(uniform(rng, 0, 999));
  p.programme.title = label_text(rng);
  if (shape.rich_metadata) {
    if (coin(rng)) p.programme.description = label_text(rng);
    if (coin(rng)) p.programme.language = pick<const char*>(rng, {"en", "de", "en-GB", "fr"});
    if (coin(rng)) {
      p.programme.formal["author"] = ascii_text(rng, 20);
      p.programme.categories["author"] = meta::Category::descriptive;
    }
    if (coin(rng)) p.programme.formal["producer"] = label_text(rng);
  }

  const auto tracks = uniform(rng, 1, shape.max_tracks);
  for (std::uint64_t t = 0; t < tracks; ++t) {
    meta::Track track;
    track.id = "t" + std::to_string(t);
    track.index = static_cast<int>(t);
    track.kind = pick(rng, {meta::TrackKind::dialogue, meta::TrackKind::music,
                            meta::TrackKind::ambience, meta::TrackKind::effects,
                            meta::TrackKind::other});
    if (shape.rich_metadata && coin(rng)) track.language = "en";
    if (shape.rich_metadata && coin(rng)) track.audio_ref = track.id + ".wav";
    p.tracks.push_back(std::move(track));
  }

  std::vector<std::uint64_t> cursor(tracks, 0);
  const auto count = uniform(rng, 1, shape.max_segments);
  const bool extended = shape.rich_metadata && coin(rng, 0.3);
  if (extended) p.extensions.attributes.emplace_back("xmlns:ext", "urn:example:ext");
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto t = uniform(rng, 0, tracks - 1);
    meta::Segment s;
    s.id = "s" + std::to_string(i);
    s.track_ref = p.tracks[t].id;
    cursor[t] += coin(rng, 0.3) ? uniform(rng, 1, 5000) : 0;
    s.start = ContentTime{cursor[t]};
    s.duration = ContentTime{uniform(rng, 1, shape.max_duration_ms)};
    cursor[t] += s.duration.ms;
    s.loi = static_cast<int>(uniform(rng, 1, static_cast<std::uint64_t>(shape.max_loi)));
    s.label = label_text(rng);
    if (shape.rich_metadata) {
      for (auto n = uniform(rng, 0, 3); n > 0; --n)
        s.topics.insert(pick<const char*>(rng, {"sport", "weather", "politics", "culture"}));
      if (coin(rng, 0.6)) {
        s.location = meta::GeoPoint{std::uniform_real_distribution<double>(-90, 90)(rng),
                                    std::uniform_real_distribution<double>(-180, 180)(rng)};
      }
      if (coin(rng, 0.6)) {
        s.timestamp = meta::UtcInstant{std::chrono::seconds(
            static_cast<std::int64_t>(uniform(rng, 946684800, 1893456000)))};
      }
      if (extended && coin(rng)) {
        s.extensions.attributes.emplace_back("ext:mood", ascii_text(rng, 8));
        xml::Element e;
        e.name = "ext:rights";
        e.attributes = {{"holder", "Example Broadcasting"}};
        e.text = "all rights reserved";
        s.extensions.elements.push_back(std::move(e));
      }
    }
    p.segments.push_back(std::move(s));
  }
  return p;
}

std::optional<std::vector<std::string>> brute_force_selection(const meta::Project& project,
                                                             std::uint64_t target_ms) {
  const auto& segs = project.segments;
  const std::size_t n = segs.size();
  std::uint64_t lead_total = 0;
  for (const auto& s : segs)
    if (s.loi == 1) lead_total += s.duration.ms;
  if (target_ms == 0 || lead_total > target_ms) return std::nullopt;

  // Rank of each segment inside its own level, in document order.
  std::vector<std::size_t> rank(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (segs[j].loi == segs[i].loi &&
          std::tie(segs[j].start, segs[j].id) < std::tie(segs[i].start, segs[i].id))
        ++rank[i];

  std::uint64_t best_mask = 0;
  int best_size = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int top = 0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        top = std::max(top, segs[i].loi);
        total += segs[i].duration.ms;
      }
    if (total > target_ms) continue;
    bool valid = true;
    std::size_t in_top = 0;
    for (std::size_t i = 0; i < n && valid; ++i) {
      const bool in = mask >> i & 1;
      if (segs[i].loi < top && !in) valid = false;
      if (segs[i].loi == top && in) ++in_top;
    }
    // The chosen members of the top level must be its first `in_top` ones.
    for (std::size_t i = 0; i < n && valid; ++i)
      if (segs[i].loi == top && (mask >> i & 1) != (rank[i] < in_top)) valid = false;
    if (!valid) continue;
    const int size = std::popcount(mask);
    if (size > best_size) {
      best_size = size;
      best_mask = mask;
    }
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1) ids.push_back(segs[i].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

double chord_distance_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr long double r = 6371.0L;
  const long double k = std::numbers::pi_v<long double> / 180.0L;
  auto unit = [&](double lat, double lon) {
    const long double a = lat * k, b = lon * k;
    return std::array<long double, 3>{std::cos(a) * std::cos(b), std::cos(a) * std::sin(b),
                                      std::sin(a)};
  };
  const auto p = unit(lat1, lon1), q = unit(lat2, lon2);
  const long double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  const long double chord = std::sqrt(dx * dx + dy * dy + dz * dz);
  return static_cast<double>(2.0L * r * std::asin(std::min(1.0L, chord / 2.0L)));
}

std::vector<quality::Record> load_records(const fs::path& path) {
  const auto j = nlohmann::json::parse(read_text(path));
  std::vector<quality::Record> out;
  for (const auto& item : j) {
    quality::Record r;
    r.id = item.at("id").get<std::string>();
    for (const auto& [k, v] : item.at("fields").items())
      r.fields[k] = v.get<std::vector<std::string>>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mga::testing

#include <benchmark/benchmark.h>

#include "mga/metamodel.hpp"

namespace {

using namespace mga;

meta::Project labelled_project(std::int64_t n) {
  meta::Project p;
  p.programme.id = "bench";
  p.programme.title = "Bench & <friends>";
  meta::Track t;
  t.id = "d";
  p.tracks.push_back(t);
  for (std::int64_t i = 0; i < n; ++i) {
    meta::Segment s;
    s.id = "s" + std::to_string(i);
    s.track_ref = "d";
    s.label = "Segment \"" + std::to_string(i) + "\"";
    s.loi = static_cast<int>(i % 3) + 1;
    s.start = ContentTime{static_cast<std::uint64_t>(i) * 1000};
    s.duration = ContentTime{1000};
    s.topics = {"news", "weather"};
    s.location = meta::GeoPoint{48.0 + i * 1e-3, 11.0};
    p.segments.push_back(std::move(s));
  }
  return p;
}

void BM_ProjectToXml(benchmark::State& state) {
  const auto p = labelled_project(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(meta::to_xml(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectToXml)->Range(8, 4096);

void BM_ProjectFromXml(benchmark::State& state) {
  const auto xml = meta::to_xml(labelled_project(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(meta::from_xml(xml));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectFromXml)->Range(8, 4096);

}  // namespace

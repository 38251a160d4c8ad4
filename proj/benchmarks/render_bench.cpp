#include <benchmark/benchmark.h>

#include "mga/renderer.hpp"

namespace {

using namespace mga;

void BM_Render(benchmark::State& state) {
  const std::uint64_t seconds = 60;
  Bytes pcm(48000 * seconds * 4);
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::uint8_t>(i * 17);
  render::AudioSources sources;
  sources.emplace("d", container::make_pcm(48000, 2, 16, std::move(pcm)));

  assembly::Edl edl;
  edl.crossfade_ms = 10;
  const auto entries = static_cast<std::uint64_t>(state.range(0));
  const std::uint64_t each = seconds * 1000 / entries;
  for (std::uint64_t i = 0; i < entries; ++i)
    edl.entries.push_back({"s" + std::to_string(i), "d", ContentTime{i * each}, ContentTime{each}});

  for (auto _ : state) benchmark::DoNotOptimize(render::render(edl, sources, {}));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(render::total_frames(edl, {}, 48000)));
}
BENCHMARK(BM_Render)->Arg(1)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

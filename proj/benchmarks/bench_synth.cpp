#include <benchmark/benchmark.h>

#include "radarmon/dataset.hpp"
#include "radarmon/emitters.hpp"
#include "radarmon/radar.hpp"

using namespace radarmon;

namespace {

void BM_PulseTrain(benchmark::State& state) {
  RadarParams p;
  p.ipm = Lfm{};
  p.pw_s = 10e-6;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synth_pulse_train(p, 1e-3, kDefaultSampleRate, ++seed));
}
BENCHMARK(BM_PulseTrain)->Unit(benchmark::kMicrosecond);

void BM_Wlan(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synth_wlan({}, 1e-3, kDefaultSampleRate, ++seed));
}
BENCHMARK(BM_Wlan)->Unit(benchmark::kMicrosecond);

void BM_Lte(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synth_lte({}, 1e-3, kDefaultSampleRate, ++seed));
}
BENCHMARK(BM_Lte)->Unit(benchmark::kMicrosecond);

// Scenario chunks per second, both classes and all six scenarios.
void BM_DatasetChunks(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.train_per_class = 30;
  cfg.test_per_class = 1;
  for (auto _ : state) {
    ++cfg.seed;
    benchmark::DoNotOptimize(build_dataset(cfg));
  }
  state.SetItemsProcessed(state.iterations() * 62);
}
BENCHMARK(BM_DatasetChunks)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

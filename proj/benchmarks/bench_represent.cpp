#include <benchmark/benchmark.h>

#include <random>

#include "radarmon/represent.hpp"

using namespace radarmon;

namespace {

std::vector<IqSample> noise_chunk() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<IqSample> x(kChunkLen);
  for (auto& s : x) s = {g(rng), g(rng)};
  return x;
}

void BM_Representation(benchmark::State& state) {
  const auto r = static_cast<Representation>(state.range(0));
  const auto x = noise_chunk();
  for (auto _ : state) benchmark::DoNotOptimize(represent(r, x));
  state.SetLabel(std::string(to_string(r)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Representation)->DenseRange(0, 3);

void BM_DftMag(benchmark::State& state) {
  const auto x = noise_chunk();
  for (auto _ : state) benchmark::DoNotOptimize(dft_mag(x));
}
BENCHMARK(BM_DftMag);

}  // namespace

BENCHMARK_MAIN();

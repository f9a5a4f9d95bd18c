#include <benchmark/benchmark.h>

#include <random>

#include "radarmon/nn/layers.hpp"
#include "radarmon/nn/model.hpp"

using namespace radarmon::nn;

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// The five convolutions of the full-width model, by index.
struct ConvCase {
  Conv conv;
  Shape3 in;
};
const ConvCase kConvs[] = {
    {{32, 11, 11, 1, 5}, {2, 64, 64}}, {{32, 5, 5, 1, 2}, {32, 32, 32}}, {{64, 3, 3, 1, 1}, {32, 16, 16}},
    {{64, 3, 3, 1, 1}, {64, 8, 8}},    {{64, 3, 3, 1, 1}, {64, 8, 8}},
};

void BM_ConvForward(benchmark::State& state) {
  const auto& [c, in] = kConvs[state.range(0)];
  const auto out = output_shape(c, in);
  const auto x = uniform(in.size(), 1);
  const auto w = uniform(c.out_channels * in.c * c.kernel_h * c.kernel_w, 2);
  const auto b = uniform(c.out_channels, 3);
  std::vector<double> y(out.size());
  for (auto _ : state) {
    conv_forward(c, in, x, w, b, y);
    benchmark::ClobberMemory();
  }
  state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(out.size() * w.size() / c.out_channels),
                                               benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ConvForward)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_ConvBackward(benchmark::State& state) {
  const auto& [c, in] = kConvs[state.range(0)];
  const auto out = output_shape(c, in);
  const auto x = uniform(in.size(), 1);
  const auto w = uniform(c.out_channels * in.c * c.kernel_h * c.kernel_w, 2);
  const auto dy = uniform(out.size(), 3);
  std::vector<double> dw(w.size()), db(c.out_channels), dx(x.size());
  for (auto _ : state) {
    conv_backward(c, in, x, w, dy, dw, db, dx, 1.0);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ConvBackward)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_ModelStep(benchmark::State& state) {
  const auto v = static_cast<ModelVariant>(state.range(0));
  const auto m = build_model(v, {}, 1);
  const auto x = uniform(m.input_shape().size(), 4);
  auto grads = zero_gradients(m);
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_gradients(m, x, 0, grads, 1.0));
  state.SetLabel(std::string(to_string(v)) + " forward+backward, one example");
}
BENCHMARK(BM_ModelStep)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

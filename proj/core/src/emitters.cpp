#include "radarmon/emitters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "radarmon/error.hpp"
#include "radarmon/fft.hpp"
#include "radarmon/rng.hpp"

namespace radarmon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kWlanFft = 64;
constexpr std::size_t kWlanCp = 16;
constexpr double kWlanClip = 1.5;
constexpr double kMinBurstS = 66e-6;

std::size_t samples_for(double seconds, double fs_hz) {
  return static_cast<std::size_t>(std::llround(seconds * fs_hz));
}

IqSample qpsk(Rng& rng) {
  static constexpr double r = std::numbers::sqrt2 / 2.0;
  const auto bits = rng() & 3u;
  return {(bits & 1u) ? r : -r, (bits & 2u) ? r : -r};
}

/// One OFDM block of `n` samples with random QPSK on bins +-1..+-half (DC
/// empty), normalized to unit mean power.
std::vector<IqSample> ofdm_block(std::size_t n, std::size_t half, Rng& rng) {
  std::vector<IqSample> bins(n, IqSample{});
  for (std::size_t k = 1; k <= half; ++k) {
    bins[k] = qpsk(rng);
    bins[n - k] = qpsk(rng);
  }
  auto time = fft_inverse(bins);
  const double scale = 1.0 / std::sqrt(static_cast<double>(2 * half));
  for (auto& s : time) s *= scale;
  return time;
}

double mean_power(std::span<const IqSample> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : x) acc += std::norm(s);
  return acc / static_cast<double>(x.size());
}

double peak_magnitude(std::span<const IqSample> x) {
  double p = 0.0;
  for (const auto& s : x) p = std::max(p, std::abs(s));
  return p;
}

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

void WlanParams::validate(double fs_hz) const {
  if (!(bandwidth_hz > 0.0) || bandwidth_hz > fs_hz) throw InvalidArgument("WLAN bandwidth must be in (0, fs]");
  if (!(burst_min_s > kMinBurstS) || burst_max_s < burst_min_s) {
    throw InvalidArgument("WLAN bursts must be longer than 66 us and burst_max >= burst_min");
  }
  if (idle_min_s < 0.0 || idle_max_s < idle_min_s) throw InvalidArgument("WLAN idle range invalid");
  if (center_offsets_hz.empty()) throw InvalidArgument("WLAN needs at least one center offset");
  for (double f : center_offsets_hz) {
    if (!(std::abs(f) < fs_hz / 2.0)) throw InvalidArgument("WLAN center offset must be below fs/2");
  }
  if (power < 0.0) throw InvalidArgument("WLAN power must be non-negative");
}

void LteParams::validate(double fs_hz) const {
  if (!(load >= 0.0 && load <= 1.0)) throw InvalidArgument("LTE load must lie in [0, 1]");
  if (!(symbol_len_s > 0.0)) throw InvalidArgument("LTE symbol length must be positive");
  if (reference_burst_s <= 0.0 || reference_burst_s > symbol_len_s) {
    throw InvalidArgument("LTE reference burst must fit inside a symbol");
  }
  if (power < 0.0) throw InvalidArgument("LTE power must be non-negative");
  const auto n = samples_for(symbol_len_s, fs_hz);
  if (static_cast<std::size_t>(lte_occupied_subcarriers(bandwidth_hz)) + 1 > n) {
    throw InvalidArgument("LTE bandwidth does not fit the sample rate");
  }
}

int lte_occupied_subcarriers(double bandwidth_hz) {
  static constexpr std::array<std::pair<double, int>, 6> table{
      {{1.4e6, 6}, {3e6, 15}, {5e6, 25}, {10e6, 50}, {15e6, 75}, {20e6, 100}}};
  for (const auto& [bw, rbs] : table) {
    if (std::abs(bandwidth_hz - bw) < 1.0) return 12 * rbs;
  }
  throw InvalidArgument("LTE bandwidth must be one of 1.4, 3, 5, 10, 15, 20 MHz");
}

SampleStream synth_wlan(const WlanParams& params, double duration_s, double fs_hz, std::uint64_t seed) {
  params.validate(fs_hz);
  if (!(duration_s > params.burst_min_s)) throw InvalidArgument("duration shorter than the minimum WLAN burst");

  SampleStream stream;
  stream.sample_rate_hz = fs_hz;
  const auto total = samples_for(duration_s, fs_hz);
  stream.samples.assign(total, IqSample{});

  Rng rng(seed);
  const auto half = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(params.bandwidth_hz / (fs_hz / kWlanFft) / 2.0)), 1, kWlanFft / 2 - 1);
  const double amp = std::sqrt(params.power);

  // Random phase into the contention cycle: start idle for U(0, idle_max).
  std::size_t pos = samples_for(uniform(rng, 0.0, params.idle_max_s), fs_hz);
  while (pos < total) {
    const auto burst_len = std::max<std::size_t>(1, samples_for(uniform(rng, params.burst_min_s, params.burst_max_s), fs_hz));
    const auto offset_idx = std::uniform_int_distribution<std::size_t>(0, params.center_offsets_hz.size() - 1)(rng);
    const double offset = params.center_offsets_hz[offset_idx];

    std::vector<IqSample> burst;
    burst.reserve(burst_len + kWlanFft + kWlanCp);
    while (burst.size() < burst_len) {
      auto block = ofdm_block(kWlanFft, half, rng);
      burst.insert(burst.end(), block.end() - kWlanCp, block.end());  // cyclic prefix
      burst.insert(burst.end(), block.begin(), block.end());
    }
    burst.resize(burst_len);

    const double clip = kWlanClip * std::sqrt(mean_power(burst));
    for (auto& s : burst) {
      const double m = std::abs(s);
      if (m > clip) s *= clip / m;
    }
    const double norm = mean_power(burst) > 0.0 ? 1.0 / std::sqrt(mean_power(burst)) : 0.0;

    const auto end = std::min(total, pos + burst_len);
    const double w = kTwoPi * offset / fs_hz;
    for (std::size_t n = pos; n < end; ++n) {
      stream.samples[n] = amp * norm * burst[n - pos] * std::polar(1.0, std::fmod(w * static_cast<double>(n), kTwoPi));
    }
    if (params.power > 0.0) {
      const std::span<const IqSample> seg(stream.samples.data() + pos, end - pos);
      stream.annotations.push_back({static_cast<std::int64_t>(pos), static_cast<std::int64_t>(end - pos),
                                    Emitter::Wlan, peak_magnitude(seg)});
    }
    pos = end + samples_for(uniform(rng, params.idle_min_s, params.idle_max_s), fs_hz);
  }
  normalize_annotations(stream.annotations);
  return stream;
}

SampleStream synth_lte(const LteParams& params, double duration_s, double fs_hz, std::uint64_t seed) {
  params.validate(fs_hz);
  if (duration_s < params.symbol_len_s) throw InvalidArgument("duration shorter than one LTE symbol");

  SampleStream stream;
  stream.sample_rate_hz = fs_hz;
  const auto total = samples_for(duration_s, fs_hz);
  stream.samples.assign(total, IqSample{});

  Rng rng(seed);
  const auto sym_len = samples_for(params.symbol_len_s, fs_hz);
  const auto half = static_cast<std::size_t>(lte_occupied_subcarriers(params.bandwidth_hz) / 2);
  const auto ref_len = std::max<std::size_t>(1, samples_for(params.reference_burst_s, fs_hz));
  const double amp = std::sqrt(params.power);
  const double idle_amp = amp * std::pow(10.0, params.idle_level_db / 20.0);
  std::bernoulli_distribution loaded(params.load);

  for (std::size_t pos = 0; pos < total; pos += sym_len) {
    const auto end = std::min(total, pos + sym_len);
    const bool data = loaded(rng);
    const auto block = ofdm_block(sym_len, half, rng);
    if (data) {
      for (std::size_t n = pos; n < end; ++n) stream.samples[n] = amp * block[n - pos];
      if (params.power > 0.0) {
        const std::span<const IqSample> seg(stream.samples.data() + pos, end - pos);
        stream.annotations.push_back({static_cast<std::int64_t>(pos), static_cast<std::int64_t>(end - pos),
                                      Emitter::Lte, peak_magnitude(seg)});
      }
      continue;
    }
    // Reference-only symbol: the burst is a window of a fresh full-band
    // block rescaled to unit power, the remainder a low-level block.
    const auto burst_end = params.reference_burst ? std::min(end, pos + ref_len) : pos;
    if (burst_end > pos) {
      const auto ref = ofdm_block(sym_len, half, rng);
      const double norm = 1.0 / std::sqrt(std::max(mean_power({ref.data(), burst_end - pos}), 1e-300));
      for (std::size_t n = pos; n < burst_end; ++n) stream.samples[n] = amp * norm * ref[n - pos];
      if (params.power > 0.0) {
        const std::span<const IqSample> seg(stream.samples.data() + pos, burst_end - pos);
        stream.annotations.push_back({static_cast<std::int64_t>(pos), static_cast<std::int64_t>(burst_end - pos),
                                      Emitter::Lte, peak_magnitude(seg)});
      }
    }
    for (std::size_t n = burst_end; n < end; ++n) stream.samples[n] = idle_amp * block[n - pos];
  }
  return stream;
}

void add_awgn(std::span<IqSample> samples, double power, std::uint64_t seed) {
  if (power < 0.0) throw InvalidArgument("noise power must be non-negative");
  if (power == 0.0) return;
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(power / 2.0));
  for (auto& s : samples) {
    const double re = g(rng);
    s += IqSample{re, g(rng)};
  }
}

SampleStream synth_noise(double duration_s, double fs_hz, double power, std::uint64_t seed) {
  if (power < 0.0) throw InvalidArgument("noise power must be non-negative");
  if (!(fs_hz > 0.0)) throw InvalidArgument("sample rate must be positive");
  SampleStream stream;
  stream.sample_rate_hz = fs_hz;
  stream.samples.assign(samples_for(duration_s, fs_hz), IqSample{});
  add_awgn(stream.samples, power, seed);
  return stream;
}

}  // namespace radarmon

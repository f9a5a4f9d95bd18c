#include "radarmon/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radarmon/emitters.hpp"
#include "radarmon/error.hpp"

namespace radarmon {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void ChannelSpec::validate() const {
  if (taps.empty()) throw InvalidArgument("channel needs at least one tap");
  if (taps.front().delay != 0) throw InvalidArgument("first channel tap must have delay 0");
  if (noise_power < 0.0) throw InvalidArgument("noise power must be non-negative");
}

SampleStream apply_cfo(const SampleStream& stream, double cfo_hz) {
  if (!(std::abs(cfo_hz) < stream.sample_rate_hz / 2.0)) throw InvalidArgument("CFO must be below fs/2");
  SampleStream out = stream;
  if (cfo_hz == 0.0) return out;
  const double w = kTwoPi * cfo_hz / stream.sample_rate_hz;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    out.samples[n] *= std::polar(1.0, std::fmod(w * static_cast<double>(n), kTwoPi));
  }
  return out;
}

SampleStream apply_multipath(const SampleStream& stream, std::span<const Tap> taps) {
  if (taps.empty()) throw InvalidArgument("channel needs at least one tap");
  const auto n = stream.size();
  std::size_t max_delay = 0;
  for (const auto& t : taps) {
    if (t.delay >= n && n > 0) throw InvalidArgument("tap delay exceeds stream length");
    max_delay = std::max(max_delay, t.delay);
  }
  SampleStream out;
  out.sample_rate_hz = stream.sample_rate_hz;
  out.samples.assign(n, IqSample{});
  for (const auto& t : taps) {
    for (std::size_t i = t.delay; i < n; ++i) out.samples[i] += t.gain * stream.samples[i - t.delay];
  }
  out.annotations = stream.annotations;
  for (auto& a : out.annotations) {
    a.len = std::min<std::int64_t>(a.len + static_cast<std::int64_t>(max_delay),
                                   static_cast<std::int64_t>(n) - a.start_idx);
  }
  normalize_annotations(out.annotations);
  return out;
}

SampleStream mix(std::span<const SampleStream> streams, std::span<const double> gains, double noise_power,
                 std::uint64_t seed) {
  if (streams.empty()) throw InvalidArgument("mix needs at least one stream");
  if (streams.size() != gains.size()) throw InvalidArgument("mix needs one gain per stream");
  const auto n = streams.front().size();
  const double fs = streams.front().sample_rate_hz;
  for (const auto& s : streams) {
    if (s.size() != n || s.sample_rate_hz != fs) throw InvalidArgument("mixed streams differ in length or rate");
  }

  if (noise_power < 0.0) throw InvalidArgument("noise power must be non-negative");
  SampleStream out;
  out.sample_rate_hz = fs;
  out.samples.assign(n, IqSample{});
  for (std::size_t k = 0; k < streams.size(); ++k) {
    const double g = gains[k];
    const auto& src = streams[k].samples;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] += g * src[i];
    for (auto a : streams[k].annotations) {
      a.peak_amplitude *= std::abs(g);
      out.annotations.push_back(a);
    }
  }
  add_awgn(out.samples, noise_power, seed);
  normalize_annotations(out.annotations);
  return out;
}

SampleStream apply_channel(const SampleStream& stream, const ChannelSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto out = apply_multipath(stream, spec.taps);
  out = apply_cfo(out, spec.cfo_hz);
  const SampleStream parts[] = {std::move(out)};
  const double gains[] = {spec.gain};
  return mix(parts, gains, spec.noise_power, seed);
}

std::vector<Tap> random_two_path(Rng& rng, double max_echo, std::size_t min_delay, std::size_t max_delay) {
  std::uniform_real_distribution<double> mag(0.0, max_echo);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_int_distribution<std::size_t> delay(min_delay, max_delay);
  const double m = mag(rng);
  const double p = phase(rng);
  const auto d = delay(rng);
  return {Tap{}, Tap{std::polar(m, p), d}};
}

}  // namespace radarmon

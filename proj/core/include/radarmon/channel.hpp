#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "radarmon/iq.hpp"
#include "radarmon/rng.hpp"

namespace radarmon {

/// One path of a sparse integer-delay FIR channel.
struct Tap {
  std::complex<double> gain{1.0, 0.0};
  std::size_t delay = 0;
};

struct ChannelSpec {
  double cfo_hz = 0.0;
  std::vector<Tap> taps{Tap{}};
  double gain = 1.0;
  double noise_power = 0.0;

  void validate() const;
};

/// x'[n] = x[n] exp(2 pi j n cfo / fs). Annotations are kept.
SampleStream apply_cfo(const SampleStream& stream, double cfo_hz);

/// Linear convolution with the taps, truncated to the input length.
/// Annotations grow by the largest tap delay.
SampleStream apply_multipath(const SampleStream& stream, std::span<const Tap> taps);

/// Sample-wise weighted sum plus AWGN of `noise_power`; keeps every input's
/// annotations. All streams must share length and sample rate.
SampleStream mix(std::span<const SampleStream> streams, std::span<const double> gains, double noise_power,
                 std::uint64_t seed);

/// multipath -> CFO -> gain -> AWGN for a single emitter.
SampleStream apply_channel(const SampleStream& stream, const ChannelSpec& spec, std::uint64_t seed);

/// Two-path channel: direct path plus one echo of magnitude U(0, max_echo)
/// with uniform phase, delayed U{min_delay, .., max_delay} samples.
std::vector<Tap> random_two_path(Rng& rng, double max_echo = 0.5, std::size_t min_delay = 1,
                                 std::size_t max_delay = 8);

}  // namespace radarmon

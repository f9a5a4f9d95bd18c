#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radarmon/iq.hpp"

namespace radarmon {

/// Bursty OFDM-like emitter standing in for a WLAN secondary user. Power is
/// the mean per-sample power inside a burst.
struct WlanParams {
  double bandwidth_hz = 16.6e6;
  double burst_min_s = 100e-6;
  double burst_max_s = 1e-3;
  double idle_min_s = 20e-6;
  double idle_max_s = 200e-6;
  std::vector<double> center_offsets_hz{0.0};
  double power = 1.0;

  void validate(double fs_hz) const;
};

/// Continuous downlink LTE-like emitter. Each 66.7 us symbol carries
/// full-band pseudo-data with probability `load`; otherwise it holds a
/// short full-band reference burst followed by a low-level remainder
/// (`idle_level_db` relative to `power`).
struct LteParams {
  double bandwidth_hz = 10e6;
  double symbol_len_s = 66.7e-6;
  double load = 0.5;
  bool reference_burst = true;
  double reference_burst_s = 5e-6;
  double idle_level_db = -20.0;
  double power = 1.0;

  void validate(double fs_hz) const;
};

/// Occupied subcarrier count of an LTE channel (12 per resource block).
int lte_occupied_subcarriers(double bandwidth_hz);

SampleStream synth_wlan(const WlanParams& params, double duration_s, double fs_hz, std::uint64_t seed);
SampleStream synth_lte(const LteParams& params, double duration_s, double fs_hz, std::uint64_t seed);

/// Circular complex Gaussian samples with E|x|^2 = power.
SampleStream synth_noise(double duration_s, double fs_hz, double power, std::uint64_t seed);

/// Adds the same noise synth_noise would draw for (power, seed) in place.
void add_awgn(std::span<IqSample> samples, double power, std::uint64_t seed);

}  // namespace radarmon

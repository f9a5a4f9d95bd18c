#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "radarmon/iq.hpp"

namespace radarmon {

/// Constant-carrier pulse.
struct Pc {};

/// Linear chirp sweeping -excursion/2 .. +excursion/2 over the pulse.
struct Lfm {
  double excursion_hz = 4e6;
};

/// Binary phase code; sample i of an N-sample pulse carries chip floor(i*L/N).
struct BarkerPm {
  std::vector<int> code = barker13();

  static std::vector<int> barker13() { return {+1, +1, +1, +1, +1, -1, -1, +1, +1, -1, +1, -1, +1}; }
};

/// Intra-pulse modulation.
using Ipm = std::variant<Pc, Lfm, BarkerPm>;

std::string describe(const Ipm& ipm);

struct ConstantAmplitude {
  double a = 1.0;
};

/// Two-level envelope of a rotating antenna: `peak` while the main beam
/// illuminates the receiver (the first `beamwidth_s` of each period),
/// `floor` otherwise.
struct ScanAmplitude {
  double period_s = 10e-3;
  double beamwidth_s = 2e-3;
  double peak = 1.0;
  double floor = 0.0;
};

using AntennaProfile = std::variant<ConstantAmplitude, ScanAmplitude>;

double amplitude_at(const AntennaProfile& profile, double t_s);

/// Uniform per-pulse perturbations: amplitude scaled by 1 + U(-amplitude_frac,
/// amplitude_frac), time of arrival shifted by U{-toa_samples, .., toa_samples}.
struct PulseJitter {
  double amplitude_frac = 0.01;
  int toa_samples = 2;
};

struct RadarParams {
  Ipm ipm = Pc{};
  double pw_s = 2e-6;
  double pri_s = 1e-3;
  double carrier_offset_hz = 0.0;
  AntennaProfile amplitude_profile = ConstantAmplitude{};
  PulseJitter jitter{};
  double first_toa_s = 0.0;

  void validate(double fs_hz) const;
};

/// Unit-amplitude pulse shape of round(pw_s * fs_hz) samples.
std::vector<IqSample> synth_pulse(const Ipm& ipm, double pw_s, double fs_hz);

/// Pulse train x[n] = sum_m A_m p[n - toa_m] exp(2 pi j n f_c / fs), with
/// toa_m = first_toa + m * pri (+ jitter). One Radar annotation per pulse.
SampleStream synth_pulse_train(const RadarParams& params, double duration_s, double fs_hz, std::uint64_t seed);

}  // namespace radarmon

#include "radarmon/radar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radarmon/error.hpp"
#include "radarmon/rng.hpp"

namespace radarmon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void validate_ipm(const Ipm& ipm) {
  std::visit(overloaded{[](const Pc&) {},
                        [](const Lfm& l) {
                          if (!(l.excursion_hz > 0.0)) throw InvalidArgument("LFM excursion must be positive");
                        },
                        [](const BarkerPm& b) {
                          if (b.code.empty()) throw InvalidArgument("phase code must be non-empty");
                          for (int c : b.code) {
                            if (c != 1 && c != -1) throw InvalidArgument("phase code entries must be +1 or -1");
                          }
                        }},
             ipm);
}

}  // namespace

std::string describe(const Ipm& ipm) {
  return std::visit(overloaded{[](const Pc&) { return std::string("PC"); },
                               [](const Lfm& l) { return "LFM(" + std::to_string(l.excursion_hz) + " Hz)"; },
                               [](const BarkerPm& b) { return "PM(Barker " + std::to_string(b.code.size()) + ")"; }},
                    ipm);
}

double amplitude_at(const AntennaProfile& profile, double t_s) {
  return std::visit(overloaded{[](const ConstantAmplitude& c) { return c.a; },
                               [t_s](const ScanAmplitude& s) {
                                 const double phase = std::fmod(t_s, s.period_s);
                                 return phase < s.beamwidth_s ? s.peak : s.floor;
                               }},
                    profile);
}

void RadarParams::validate(double fs_hz) const {
  validate_ipm(ipm);
  if (!(pw_s > 0.0) || !(pw_s < pri_s)) throw InvalidArgument("radar requires 0 < pw < pri");
  if (!(std::abs(carrier_offset_hz) < fs_hz / 2.0)) throw InvalidArgument("carrier offset must be below fs/2");
  if (first_toa_s < 0.0) throw InvalidArgument("first_toa_s must be non-negative");
  if (jitter.amplitude_frac < 0.0 || jitter.toa_samples < 0) throw InvalidArgument("jitter must be non-negative");
  if (const auto* s = std::get_if<ScanAmplitude>(&amplitude_profile)) {
    if (!(s->peak > s->floor) || s->floor < 0.0) throw InvalidArgument("scan profile requires peak > floor >= 0");
    if (!(s->period_s > 0.0) || s->beamwidth_s < 0.0) throw InvalidArgument("scan period must be positive");
  } else if (std::get<ConstantAmplitude>(amplitude_profile).a < 0.0) {
    throw InvalidArgument("constant amplitude must be non-negative");
  }
}

std::vector<IqSample> synth_pulse(const Ipm& ipm, double pw_s, double fs_hz) {
  validate_ipm(ipm);
  if (!(fs_hz > 0.0)) throw InvalidArgument("sample rate must be positive");
  const auto n_samples = static_cast<long>(std::lround(pw_s * fs_hz));
  if (n_samples < 2) throw InvalidArgument("pulse width too short for sample rate");
  const auto n = static_cast<std::size_t>(n_samples);

  std::vector<IqSample> p(n);
  std::visit(overloaded{[&](const Pc&) { std::fill(p.begin(), p.end(), IqSample{1.0, 0.0}); },
                        [&](const Lfm& l) {
                          const double rate = l.excursion_hz / (2.0 * pw_s);
                          for (std::size_t i = 0; i < n; ++i) {
                            const double t = static_cast<double>(i) / fs_hz;
                            p[i] = std::polar(1.0, kTwoPi * (-l.excursion_hz / 2.0 * t + rate * t * t));
                          }
                        },
                        [&](const BarkerPm& b) {
                          const std::size_t chips = b.code.size();
                          for (std::size_t i = 0; i < n; ++i) {
                            p[i] = {static_cast<double>(b.code[i * chips / n]), 0.0};
                          }
                        }},
             ipm);
  return p;
}

SampleStream synth_pulse_train(const RadarParams& params, double duration_s, double fs_hz, std::uint64_t seed) {
  params.validate(fs_hz);
  if (duration_s < params.pri_s) throw InvalidArgument("duration must cover at least one PRI");

  const auto pulse = synth_pulse(params.ipm, params.pw_s, fs_hz);
  const auto total = static_cast<std::int64_t>(std::llround(duration_s * fs_hz));

  SampleStream stream;
  stream.sample_rate_hz = fs_hz;
  stream.samples.assign(static_cast<std::size_t>(total), IqSample{});

  Rng rng(seed);
  std::uniform_real_distribution<double> amp_jitter(-params.jitter.amplitude_frac, params.jitter.amplitude_frac);
  std::uniform_int_distribution<int> toa_jitter(-params.jitter.toa_samples, params.jitter.toa_samples);
  const double w = kTwoPi * params.carrier_offset_hz / fs_hz;

  for (std::int64_t m = 0;; ++m) {
    const double nominal_s = params.first_toa_s + static_cast<double>(m) * params.pri_s;
    const auto nominal = static_cast<std::int64_t>(std::llround(nominal_s * fs_hz));
    if (nominal >= total) break;
    // Draw both jitters for every pulse so the random sequence does not
    // depend on which pulses get clipped.
    const double a_jit = params.jitter.amplitude_frac > 0.0 ? amp_jitter(rng) : 0.0;
    const int t_jit = params.jitter.toa_samples > 0 ? toa_jitter(rng) : 0;
    const std::int64_t start = std::max<std::int64_t>(0, nominal + t_jit);
    const std::int64_t end = std::min<std::int64_t>(total, start + static_cast<std::int64_t>(pulse.size()));
    if (end <= start) continue;

    const double amp = amplitude_at(params.amplitude_profile, nominal_s) * (1.0 + a_jit);
    for (std::int64_t n = start; n < end; ++n) {
      const double phase = std::fmod(w * static_cast<double>(n), kTwoPi);
      stream.samples[static_cast<std::size_t>(n)] =
          amp * pulse[static_cast<std::size_t>(n - start)] * std::polar(1.0, phase);
    }
    stream.annotations.push_back({start, end - start, Emitter::Radar, amp});
  }
  return stream;
}

}  // namespace radarmon

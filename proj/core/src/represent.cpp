#include "radarmon/represent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "radarmon/error.hpp"
#include "radarmon/fft.hpp"

namespace radarmon {

namespace {

constexpr double kPi = std::numbers::pi;

void require_chunk(std::span<const IqSample> x) {
  if (x.size() != kChunkLen) {
    throw ShapeError("representation expects " + std::to_string(kChunkLen) + " samples, got " +
                     std::to_string(x.size()));
  }
}

const std::vector<double>& hann64() {
  static const std::vector<double> w = [] {
    constexpr auto n = SpectrogramGeometry::kFft;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / (n - 1)));
    return v;
  }();
  return w;
}

std::vector<double> normalized_amplitude(std::span<const IqSample> x) {
  auto a = amplitude(x);
  const double peak = *std::max_element(a.begin(), a.end());
  if (peak < kPhaseEpsilon) {
    std::fill(a.begin(), a.end(), 0.0);
  } else {
    for (auto& v : a) v /= peak;
  }
  return a;
}

std::vector<double> normalized_phase(std::span<const IqSample> x) {
  auto p = phase_diff(x);
  for (auto& v : p) v = (v + kPi) / (2.0 * kPi);
  return p;
}

Image square_image(std::vector<double> values, std::size_t side) {
  return Image{1, side, side, std::move(values)};
}

}  // namespace

std::vector<double> amplitude(std::span<const IqSample> x) {
  std::vector<double> a(x.size());
  std::transform(x.begin(), x.end(), a.begin(), [](const IqSample& s) { return std::abs(s); });
  return a;
}

std::vector<double> phase_diff(std::span<const IqSample> x) {
  std::vector<double> d(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    if (std::abs(x[n]) < kPhaseEpsilon || std::abs(x[n - 1]) < kPhaseEpsilon) continue;
    double v = std::arg(x[n] * std::conj(x[n - 1]));
    if (v == -kPi) v = kPi;  // atan2 can return -pi for a negative-zero imaginary part
    d[n] = v;
  }
  return d;
}

Image spectrogram(std::span<const IqSample> x) {
  require_chunk(x);
  using G = SpectrogramGeometry;
  Image img{1, G::kFft, G::kFrames, std::vector<double>(G::kFft * G::kFrames, 0.0)};

  const bool all_zero = std::all_of(x.begin(), x.end(), [](const IqSample& s) { return s == IqSample{}; });
  if (all_zero) return img;

  const auto& w = hann64();
  std::vector<double> db(G::kFft * G::kFrames, 10.0 * std::log10(G::kFloor));
  std::vector<std::complex<double>> frame(G::kFft), spec(G::kFft);
  for (std::size_t f = 0; f < G::kValidFrames; ++f) {
    for (std::size_t i = 0; i < G::kFft; ++i) frame[i] = x[f * G::kHop + i] * w[i];
    fft_forward(frame, spec);
    for (std::size_t k = 0; k < G::kFft; ++k) {
      const auto row = (k + G::kFft / 2) % G::kFft;
      db[row * G::kFrames + f] = 10.0 * std::log10(std::norm(spec[k]) + G::kFloor);
    }
  }
  const double top = *std::max_element(db.begin(), db.end());
  const double bottom = top - G::kDynamicRangeDb;
  for (std::size_t i = 0; i < db.size(); ++i) {
    img.data[i] = (std::clamp(db[i], bottom, top) - bottom) / G::kDynamicRangeDb;
  }
  return img;
}

std::vector<double> dft_mag(std::span<const IqSample> x) {
  const auto spec = fft_forward(x);
  std::vector<double> mag(spec.size());
  std::transform(spec.begin(), spec.end(), mag.begin(), [](const auto& c) { return std::norm(c); });
  fft_shift(std::span<double>(mag));
  return mag;
}

Image ap_tensor(std::span<const IqSample> x) {
  require_chunk(x);
  const auto a = normalized_amplitude(x);
  const auto p = normalized_phase(x);
  constexpr std::size_t side = 64;
  Image img{2, side, side, std::vector<double>(2 * side * side)};
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& src = c == 0 ? a : p;
    for (std::size_t r = 0; r < side; ++r) {
      const auto row = src.begin() + static_cast<std::ptrdiff_t>((r / kApRowRepeat) * side);
      std::copy(row, row + side, img.data.begin() + static_cast<std::ptrdiff_t>((c * side + r) * side));
    }
  }
  return img;
}

Image amplitude_image(std::span<const IqSample> x) {
  require_chunk(x);
  return square_image(normalized_amplitude(x), 32);
}

Image phase_image(std::span<const IqSample> x) {
  require_chunk(x);
  return square_image(normalized_phase(x), 32);
}

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Spectrogram: return "spectrogram";
    case Representation::Amplitude: return "amplitude";
    case Representation::PhaseDiff: return "phase";
    case Representation::Ap: return "ap";
  }
  return "unknown";
}

Representation representation_from_string(std::string_view s) {
  for (auto r : {Representation::Spectrogram, Representation::Amplitude, Representation::PhaseDiff,
                 Representation::Ap}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown representation '" + std::string(s) + "'");
}

Image represent(Representation r, std::span<const IqSample> x) {
  switch (r) {
    case Representation::Spectrogram: return spectrogram(x);
    case Representation::Amplitude: return amplitude_image(x);
    case Representation::PhaseDiff: return phase_image(x);
    case Representation::Ap: return ap_tensor(x);
  }
  throw InvalidArgument("unknown representation");
}

}  // namespace radarmon

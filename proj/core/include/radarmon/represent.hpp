#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "radarmon/iq.hpp"

namespace radarmon {

/// Dense channels x height x width image, row-major within a channel.
struct Image {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  double at(std::size_t c, std::size_t r, std::size_t col) const { return data[(c * height + r) * width + col]; }
  double& at(std::size_t c, std::size_t r, std::size_t col) { return data[(c * height + r) * width + col]; }
  friend bool operator==(const Image&, const Image&) = default;
};

/// STFT geometry for the 64 x 64 spectrogram: 64-point Hann window, hop 16,
/// 61 frames from a 1024-sample chunk zero-padded to 64 columns.
struct SpectrogramGeometry {
  static constexpr std::size_t kFft = 64;
  static constexpr std::size_t kHop = 16;
  static constexpr std::size_t kFrames = 64;
  static constexpr std::size_t kValidFrames = (kChunkLen - kFft) / kHop + 1;
  static constexpr double kDynamicRangeDb = 50.0;
  static constexpr double kFloor = 1e-12;
};

/// Magnitudes below this are treated as zero by phase_diff.
inline constexpr double kPhaseEpsilon = 1e-12;

/// |x[n]|.
std::vector<double> amplitude(std::span<const IqSample> x);

/// angle(x[n] conj(x[n-1])) in (-pi, pi]; element 0, and any n where either
/// sample is below kPhaseEpsilon in magnitude, is 0.
std::vector<double> phase_diff(std::span<const IqSample> x);

/// 1 x 64 x 64 image, rows = FFT-shifted frequency bins (DC at row 32),
/// columns = frames. Cells are dB power clipped to the top 50 dB of the
/// chunk and mapped to [0, 1]. An all-zero chunk maps to all zeros.
Image spectrogram(std::span<const IqSample> x);

/// |DFT_N(x)|^2, FFT-shifted.
std::vector<double> dft_mag(std::span<const IqSample> x);

/// 2 x 64 x 64: channel 0 amplitude / max amplitude (zeros when the max is
/// below kPhaseEpsilon), channel 1 (phase_diff + pi) / (2 pi). Each
/// 1024-vector is laid out row-major as 16 rows of 64 consecutive samples,
/// and every row is repeated 4 times, so image row r holds samples
/// 64 * (r / 4) .. 64 * (r / 4) + 63.
inline constexpr std::size_t kApRowRepeat = 4;
Image ap_tensor(std::span<const IqSample> x);

/// 1 x 32 x 32 normalized amplitude (A-CNN input).
Image amplitude_image(std::span<const IqSample> x);

/// 1 x 32 x 32 normalized phase difference (P-CNN input).
Image phase_image(std::span<const IqSample> x);

enum class Representation { Spectrogram, Amplitude, PhaseDiff, Ap };

std::string_view to_string(Representation r);
Representation representation_from_string(std::string_view s);

/// Input image for the given representation of a 1024-sample chunk.
Image represent(Representation r, std::span<const IqSample> x);

inline Image represent(Representation r, const IqChunk& chunk) { return represent(r, chunk.samples); }

}  // namespace radarmon

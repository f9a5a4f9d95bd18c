#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace radarmon {

/// One complex baseband sample. Held at double precision in memory; files
/// store 32-bit floats.
using IqSample = std::complex<double>;

inline constexpr std::size_t kChunkLen = 1024;
inline constexpr double kDefaultSampleRate = 20e6;

enum class Emitter : std::uint8_t { Radar, Wlan, Lte };

std::string_view to_string(Emitter e);
Emitter emitter_from_string(std::string_view s);

/// Ground truth for one emission interval inside a stream.
struct PulseAnnotation {
  std::int64_t start_idx = 0;
  std::int64_t len = 1;
  Emitter emitter = Emitter::Radar;
  double peak_amplitude = 0.0;

  std::int64_t end_idx() const { return start_idx + len; }
  friend bool operator==(const PulseAnnotation&, const PulseAnnotation&) = default;
};

struct SampleStream {
  std::vector<IqSample> samples;
  double sample_rate_hz = kDefaultSampleRate;
  std::vector<PulseAnnotation> annotations;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

  /// Throws InvalidArgument unless samples are finite, the rate is positive
  /// and annotations are in bounds, sorted and non-overlapping per emitter.
  void validate() const;
};

/// Sort annotations by start index and merge overlapping or touching
/// intervals of the same emitter (peak = max of the merged peaks).
void normalize_annotations(std::vector<PulseAnnotation>& annotations);

enum class Label : std::uint8_t { RadarPresent = 0, RadarAbsent = 1 };

/// How a chunk was produced. Unlabeled is used for chunks cut from
/// arbitrary streams.
enum class Scenario : std::uint8_t { RadarOnly, RadarWlan, RadarLte, LteOnly, WlanOnly, Noise, Unlabeled };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);
std::string_view to_string(Label l);

/// Unit of classification: a fixed window of samples plus ground truth.
struct IqChunk {
  std::vector<IqSample> samples;
  Label label = Label::RadarAbsent;
  Scenario provenance = Scenario::Unlabeled;
  std::vector<bool> radar_mask;

  std::size_t size() const { return samples.size(); }
  std::size_t radar_sample_count() const;
};

/// Builds a chunk and derives its label from the mask (class 0 iff any
/// mask entry is set).
IqChunk make_chunk(std::vector<IqSample> samples, std::vector<bool> radar_mask,
                   Scenario provenance = Scenario::Unlabeled);

/// Splits a stream into floor(len / chunk_len) chunks, discarding the tail.
/// Radar masks come from the stream's Radar annotations clipped to each
/// window.
std::vector<IqChunk> chunk_stream(const SampleStream& stream, std::size_t chunk_len = kChunkLen,
                                  Scenario provenance = Scenario::Unlabeled);

/// Rounds every sample to the nearest 32-bit float pair, i.e. the value a
/// write/read cycle would produce.
void quantize_to_storage(std::span<IqSample> samples);

/// Interleaved little-endian float32 payload at `path`, metadata at
/// sidecar_path(path).
void write_iq_file(const SampleStream& stream, const std::filesystem::path& path);
SampleStream read_iq_file(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& payload);

}  // namespace radarmon

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radarmon/emitters.hpp"
#include "radarmon/iq.hpp"
#include "radarmon/radar.hpp"

namespace radarmon {

/// A named radar waveform: modulation plus pulse width.
struct WaveformSpec {
  std::string name;
  Ipm ipm;
  double pw_s = 0.0;
};

/// PC 2 us, PC 10 us, LFM 10 us (4 MHz excursion), Barker-13 PM 10 us.
std::vector<WaveformSpec> reference_waveforms();

/// Looks a waveform up by name in the reference set.
WaveformSpec waveform_by_name(const std::string& name);

/// Random two-path channel applied independently to each emitter.
struct ChannelRanges {
  bool multipath = true;
  double max_echo = 0.5;
  std::size_t min_delay = 1;
  std::size_t max_delay = 8;
};

enum class Split : std::uint8_t { Train, Test };

std::string_view to_string(Split s);

/// Everything build_dataset needs. Power levels are relative to a unit
/// radar pulse peak: noise power is 10^(-psnr/10), secondary-user power in
/// radar mixes is 10^(-sir/10), and secondary-user power in radar-absent
/// chunks is noise * 10^(su_snr/10).
struct ScenarioConfig {
  std::vector<WaveformSpec> waveforms = reference_waveforms();
  std::vector<double> offsets_hz{-6e6, -3e6, 0.0, 3e6, 6e6};
  double sample_rate_hz = kDefaultSampleRate;
  double pri_s = 1e-3;

  std::size_t train_per_class = 4000;
  std::size_t test_per_class = 1000;
  /// Relative weights of radar-only, radar+WLAN, radar+LTE within class 0.
  std::array<double, 3> present_mix{1.0, 1.0, 1.0};
  /// Relative weights of LTE-only, WLAN-only, noise within class 1.
  std::array<double, 3> absent_mix{1.0, 1.0, 1.0};

  double psnr_min_db = 0.0;
  double psnr_max_db = 20.0;
  double sir_min_db = 0.0;
  double sir_max_db = 15.0;
  double su_snr_min_db = 0.0;
  double su_snr_max_db = 20.0;

  WlanParams wlan{};
  LteParams lte{};
  std::vector<double> lte_bandwidths_hz{1.4e6, 3e6, 5e6, 10e6, 15e6, 20e6};
  double lte_load_min = 0.0;
  double lte_load_max = 1.0;

  ChannelRanges channel{};
  PulseJitter jitter{};
  std::size_t min_radar_samples = 8;
  std::uint64_t seed = 0;
  /// Generation threads. Entries are seeded individually, so the result
  /// does not depend on this.
  std::size_t workers = 1;

  void validate() const;
};

struct RadarDraw {
  std::string waveform;
  double offset_hz = 0.0;
  double pw_s = 0.0;
};

struct ManifestEntry {
  Split split = Split::Train;
  std::size_t index = 0;
  Label label = Label::RadarAbsent;
  Scenario provenance = Scenario::Noise;
  std::optional<RadarDraw> radar;
  std::optional<double> psnr_db;  // target PSNR of the radar pulse, class 0 only
  std::size_t radar_samples = 0;
};

struct Dataset {
  std::uint64_t seed = 0;
  std::vector<IqChunk> train;
  std::vector<IqChunk> test;
  std::vector<ManifestEntry> train_entries;
  std::vector<ManifestEntry> test_entries;
};

/// Class-balanced train/test chunks. Each chunk is cut from its own 1-PRI
/// stream (synthesize emitters, channel, mix, chunk) whose RNG derives from
/// (seed, split, index), so output is independent of generation order.
/// Samples are rounded to storage precision.
Dataset build_dataset(const ScenarioConfig& cfg);

/// Writes manifest.json plus train.iq / test.iq (concatenated chunks) into `dir`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& manifest);

/// Radar + noise chunks at controlled PSNR for detection sweeps.
struct PsnrSweepConfig {
  std::vector<WaveformSpec> waveforms = reference_waveforms();
  std::vector<double> psnr_db{-12, -9, -6, -3, 0, 3, 6, 9, 12, 15};
  std::size_t chunks_per_set = 200;
  std::vector<double> offsets_hz{-6e6, -3e6, 0.0, 3e6, 6e6};
  double sample_rate_hz = kDefaultSampleRate;
  double pri_s = 1e-3;
  ChannelRanges channel{};
  PulseJitter jitter{};
  std::size_t min_radar_samples = 8;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

struct PsnrSet {
  std::string waveform;
  double target_psnr_db = 0.0;
  double measured_psnr_db = 0.0;
  std::vector<IqChunk> chunks;
};

/// One set per (waveform, target PSNR), waveform-major. Noise power is
/// solved from the target and the unit pulse peak power; +inf means no noise.
std::vector<PsnrSet> build_psnr_sets(const PsnrSweepConfig& cfg);

void write_psnr_sets(std::span<const PsnrSet> sets, const std::filesystem::path& dir);
std::vector<PsnrSet> load_psnr_sets(const std::filesystem::path& manifest);

/// Pooled PSNR of a set in dB from ground-truth masks: pulse power is the
/// mean |x|^2 over mask samples minus the mean |x|^2 over the remaining
/// samples (the noise floor), divided by that floor. Returns +inf for a
/// zero noise floor and -inf when no excess pulse power is measurable.
/// Throws InvalidArgument when no chunk has a radar sample.
double estimate_psnr(std::span<const IqChunk> chunks);

}  // namespace radarmon

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radarmon/channel.hpp"
#include "radarmon/dataset.hpp"
#include "radarmon/emitters.hpp"
#include "radarmon/error.hpp"
#include "radarmon/nn/model.hpp"
#include "radarmon/nn/optimizer.hpp"
#include "radarmon/radar.hpp"

namespace radarmon::cli {

/// Schema violation. The message starts with the offending field path,
/// e.g. "train.optimizer.batch_sise: unknown key".
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct SynthRadar {
  RadarParams params;
  ChannelSpec channel;
};

struct SynthWlan {
  WlanParams params;
  ChannelSpec channel;
};

struct SynthLte {
  LteParams params;
  ChannelSpec channel;
};

/// One mixed stream: any subset of the three emitters, each through its own
/// channel, plus receiver noise.
struct SynthConfig {
  double duration_s = 1e-3;
  double sample_rate_hz = kDefaultSampleRate;
  double noise_power = 0.0;
  std::optional<SynthRadar> radar;
  std::optional<SynthWlan> wlan;
  std::optional<SynthLte> lte;
  std::uint64_t seed = 0;
};

struct TrainConfig {
  std::vector<nn::ModelVariant> variants{nn::ModelVariant::S, nn::ModelVariant::AP};
  std::vector<std::uint64_t> seeds{1};
  nn::Architecture arch;
  nn::SgdConfig optimizer;
};

struct EvalConfig {
  double threshold = 0.5;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<SynthConfig> synth;
  std::optional<ScenarioConfig> dataset;
  std::optional<PsnrSweepConfig> psnr_sweep;
  std::optional<TrainConfig> train;
  EvalConfig eval;
};

/// Parses and validates a whole config. Section seeds default to the
/// top-level seed; `workers` is applied to dataset and sweep generation.
RunConfig parse_run_config(const std::string& text, std::size_t workers = 1);
RunConfig load_run_config(const std::filesystem::path& path, std::size_t workers = 1);

}  // namespace radarmon::cli

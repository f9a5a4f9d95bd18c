#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace radarmon::cli {

struct Verbosity {
  int level = 1;  // 0 quiet, 1 normal, 2 verbose
};

/// Writes stream.iq (+ sidecar) and chunks.csv into `out_dir`.
void cmd_synth(const RunConfig& cfg, const std::filesystem::path& out_dir, Verbosity v);

/// Writes the dataset (manifest.json, train.iq, test.iq) and, when the
/// config has a psnr_sweep section, psnr_sets/ into `out_dir`.
void cmd_dataset(const RunConfig& cfg, const std::filesystem::path& out_dir, Verbosity v);

/// Trains every (variant, seed) pair of the train section on the manifest's
/// train split. Writes <variant>_seed<k>.model and <variant>_seed<k>_loss.csv.
void cmd_train(const RunConfig& cfg, const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
               Verbosity v);

/// Accuracy on the manifest's test split and/or Pd curves on PSNR sets, for
/// each model file (directories contribute their *.model files).
void cmd_eval(const RunConfig& cfg, const std::vector<std::filesystem::path>& models,
              const std::filesystem::path& manifest, const std::filesystem::path& psnr_sets,
              const std::filesystem::path& out_dir, Verbosity v);

/// Dumps one chunk's representation as CSV: channels stacked vertically,
/// one image row per line.
void cmd_repr(const std::filesystem::path& iq_file, std::size_t chunk_index, const std::string& kind,
              const std::filesystem::path& out_csv, Verbosity v);

}  // namespace radarmon::cli

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace radarmon;
using namespace radarmon::cli;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kInternalError = 2;

// RADARMON_WORKERS sets the generation thread count; unset means 1.
std::size_t workers_from_env() {
  const char* s = std::getenv("RADARMON_WORKERS");
  if (!s || !*s) return 1;
  char* end = nullptr;
  const long n = std::strtol(s, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    throw InvalidArgument(std::string("RADARMON_WORKERS must be an integer in [1, 1024], got '") + s + "'");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar pulse detection toolkit: synthesize, build datasets, train, evaluate."};
  app.require_subcommand(1);
  bool quiet = false;
  int verbose = 0;
  app.add_flag("-q,--quiet", quiet, "Only report errors");
  app.add_flag("-v,--verbose", verbose, "More progress output");

  fs::path config, out, manifest, psnr_sets, input;
  std::vector<fs::path> models;
  std::size_t chunk_index = 0;
  std::string kind;

  auto* synth = app.add_subcommand("synth", "Generate a mixed IQ stream and its chunk table");
  synth->add_option("-c,--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("-o,--out", out, "Output directory")->required();

  auto* dataset = app.add_subcommand("dataset", "Build the train/test dataset and PSNR sweep sets");
  dataset->add_option("-c,--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  dataset->add_option("-o,--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train models on a dataset manifest");
  train->add_option("-c,--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("-m,--manifest", manifest, "Dataset manifest.json")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--out", out, "Output directory for models and loss traces")->required();

  auto* eval = app.add_subcommand("eval", "Accuracy report and/or Pd curves");
  eval->add_option("-c,--config", config, "Run config (JSON); only the eval section is used")->check(CLI::ExistingFile);
  eval->add_option("--model", models, "Model file or directory of .model files")->required()->check(CLI::ExistingPath);
  eval->add_option("-m,--manifest", manifest, "Dataset manifest.json (test split is scored)")->check(CLI::ExistingFile);
  eval->add_option("-p,--psnr-sets", psnr_sets, "psnr_sets.json or its directory")->check(CLI::ExistingPath);
  eval->add_option("-o,--out", out, "Output directory for curve tables")->required();

  auto* repr = app.add_subcommand("repr", "Dump a chunk's representation matrix as CSV");
  repr->add_option("-i,--input", input, "IQ payload with sidecar")->required()->check(CLI::ExistingFile);
  repr->add_option("--chunk", chunk_index, "Chunk index within the file");
  repr->add_option("-k,--kind", kind, "spectrogram, amplitude, phase or ap")->required();
  repr->add_option("-o,--out", out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUserError;
  }

  const Verbosity v{quiet ? 0 : 1 + verbose};
  try {
    const auto workers = workers_from_env();
    const auto load = [&] { return config.empty() ? RunConfig{} : load_run_config(config, workers); };
    if (synth->parsed()) cmd_synth(load(), out, v);
    if (dataset->parsed()) cmd_dataset(load(), out, v);
    if (train->parsed()) cmd_train(load(), manifest, out, v);
    if (eval->parsed()) cmd_eval(load(), models, manifest, psnr_sets, out, v);
    if (repr->parsed()) cmd_repr(input, chunk_index, kind, out, v);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "radarmon/eval.hpp"
#include "radarmon/nn/serialize.hpp"
#include "radarmon/nn/train.hpp"
#include "radarmon/represent.hpp"
#include "radarmon/rng.hpp"

namespace radarmon::cli {

namespace fs = std::filesystem;

namespace {

void say(Verbosity v, int level, const std::string& msg) {
  if (v.level >= level) std::cerr << msg << "\n";
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::string num(double x, const char* f = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string model_stem(nn::ModelVariant v, std::uint64_t seed) {
  return std::string(nn::to_string(v)) + "_seed" + std::to_string(seed);
}

std::vector<fs::path> expand_models(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".model") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw IoError("no .model files in '" + p.string() + "'");
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, const fs::path& out_dir, Verbosity v) {
  if (!cfg.synth) throw ConfigError("synth: section required by this command");
  const auto& s = *cfg.synth;
  std::vector<SampleStream> streams;
  if (s.radar) {
    const auto x = synth_pulse_train(s.radar->params, s.duration_s, s.sample_rate_hz, derive_seed(s.seed, 1));
    streams.push_back(apply_channel(x, s.radar->channel, derive_seed(s.seed, 2)));
  }
  if (s.wlan) {
    const auto x = synth_wlan(s.wlan->params, s.duration_s, s.sample_rate_hz, derive_seed(s.seed, 3));
    streams.push_back(apply_channel(x, s.wlan->channel, derive_seed(s.seed, 4)));
  }
  if (s.lte) {
    const auto x = synth_lte(s.lte->params, s.duration_s, s.sample_rate_hz, derive_seed(s.seed, 5));
    streams.push_back(apply_channel(x, s.lte->channel, derive_seed(s.seed, 6)));
  }
  SampleStream mixed;
  if (streams.empty()) {
    mixed = synth_noise(s.duration_s, s.sample_rate_hz, s.noise_power, derive_seed(s.seed, 7));
  } else {
    const std::vector<double> gains(streams.size(), 1.0);
    mixed = mix(streams, gains, s.noise_power, derive_seed(s.seed, 7));
  }
  quantize_to_storage(mixed.samples);

  fs::create_directories(out_dir);
  write_iq_file(mixed, out_dir / "stream.iq");
  const auto chunks = chunk_stream(mixed);
  std::string table = "index,start_sample,label,radar_samples\n";
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    table += std::to_string(i) + "," + std::to_string(i * kChunkLen) + "," + std::string(to_string(chunks[i].label)) +
             "," + std::to_string(chunks[i].radar_sample_count()) + "\n";
  }
  write_file(out_dir / "chunks.csv", table);
  say(v, 1, "synth: " + std::to_string(mixed.size()) + " samples, " + std::to_string(chunks.size()) + " chunks, " +
                std::to_string(mixed.annotations.size()) + " annotations -> " + out_dir.string());
}

void cmd_dataset(const RunConfig& cfg, const fs::path& out_dir, Verbosity v) {
  if (!cfg.dataset && !cfg.psnr_sweep) throw ConfigError("dataset: section (or psnr_sweep) required by this command");
  if (cfg.dataset) {
    const auto ds = build_dataset(*cfg.dataset);
    write_dataset(ds, out_dir);
    say(v, 1, "dataset: " + std::to_string(ds.train.size()) + " train / " + std::to_string(ds.test.size()) +
                  " test chunks -> " + (out_dir / "manifest.json").string());
  }
  if (cfg.psnr_sweep) {
    const auto sets = build_psnr_sets(*cfg.psnr_sweep);
    write_psnr_sets(sets, out_dir / "psnr_sets");
    say(v, 1, "dataset: " + std::to_string(sets.size()) + " PSNR sets -> " + (out_dir / "psnr_sets").string());
    for (const auto& set : sets) {
      say(v, 2, "  " + set.waveform + " target " + num(set.target_psnr_db, "%.1f") + " dB measured " +
                    num(set.measured_psnr_db, "%.2f") + " dB");
    }
  }
}

void cmd_train(const RunConfig& cfg, const fs::path& manifest, const fs::path& out_dir, Verbosity v) {
  if (!cfg.train) throw ConfigError("train: section required by this command");
  const auto& t = *cfg.train;
  const auto ds = load_dataset(manifest);
  fs::create_directories(out_dir);
  for (auto variant : t.variants) {
    for (auto seed : t.seeds) {
      const auto stem = model_stem(variant, seed);
      nn::TrainOptions opt;
      opt.sgd = t.optimizer;
      opt.arch = t.arch;
      opt.seed = seed;
      std::vector<double> lrs;
      opt.on_iteration = [&](std::uint64_t it, double loss, double lr) {
        lrs.push_back(lr);
        if ((it + 1) % 100 == 0) {
          say(v, 2, "  " + stem + " iteration " + std::to_string(it + 1) + " loss " + num(loss, "%.4f"));
        }
      };
      say(v, 1, "train: " + stem + ", " + std::to_string(opt.sgd.iterations) + " iterations on " +
                    std::to_string(ds.train.size()) + " chunks");
      const auto r = nn::train(variant, ds.train, opt);
      nn::save_model(r.model, out_dir / (stem + ".model"));
      std::string trace = "iteration,loss,lr\n";
      for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
        trace += std::to_string(i) + "," + num(r.loss_trace[i], "%.9g") + "," + num(lrs[i], "%.9g") + "\n";
      }
      write_file(out_dir / (stem + "_loss.csv"), trace);
    }
  }
}

void cmd_eval(const RunConfig& cfg, const std::vector<fs::path>& model_paths, const fs::path& manifest,
              const fs::path& psnr_sets, const fs::path& out_dir, Verbosity v) {
  if (manifest.empty() && psnr_sets.empty()) throw InvalidArgument("eval needs --manifest and/or --psnr-sets");
  const auto paths = expand_models(model_paths);
  std::vector<Dataset> ds;
  if (!manifest.empty()) ds.push_back(load_dataset(manifest));
  std::vector<PsnrSet> sets;
  if (!psnr_sets.empty()) sets = load_psnr_sets(fs::is_directory(psnr_sets) ? psnr_sets / "psnr_sets.json" : psnr_sets);

  std::vector<EvalReport> reports;
  std::vector<PdCurve> curves;
  for (const auto& path : paths) {
    const auto model = nn::load_model(path);
    const auto name = path.stem().string();
    if (!ds.empty()) {
      auto r = evaluate(model, ds.front().test, cfg.eval.threshold);
      r.model = name;
      say(v, 1, "eval: " + name + " accuracy " + num(r.accuracy, "%.4f") + " on " +
                    std::to_string(ds.front().test.size()) + " test chunks");
      reports.push_back(std::move(r));
    }
    if (!sets.empty()) {
      for (auto& c : pd_curves(model, sets, cfg.eval.threshold)) {
        c.model = name;
        curves.push_back(std::move(c));
      }
    }
  }
  emit_curves(reports, curves, out_dir);

  std::string rho = "model,waveform,spearman\n";
  for (const auto& c : curves) {
    std::vector<double> x, y;
    for (const auto& p : c.points) {
      x.push_back(p.psnr_db);
      y.push_back(p.pd);
    }
    rho += c.model + "," + c.waveform + "," + num(spearman(x, y)) + "\n";
  }
  write_file(out_dir / "spearman.csv", rho);
  say(v, 1, "eval: " + std::to_string(reports.size()) + " reports, " + std::to_string(curves.size()) + " curves -> " +
                out_dir.string());
}

void cmd_repr(const fs::path& iq_file, std::size_t chunk_index, const std::string& kind, const fs::path& out_csv,
              Verbosity v) {
  const auto r = representation_from_string(kind);
  const auto stream = read_iq_file(iq_file);
  const auto available = stream.size() / kChunkLen;
  if (chunk_index >= available) {
    throw InvalidArgument("chunk " + std::to_string(chunk_index) + " out of range: '" + iq_file.string() + "' holds " +
                          std::to_string(available) + " chunks");
  }
  const std::span<const IqSample> x(stream.samples.data() + chunk_index * kChunkLen, kChunkLen);
  const auto img = represent(r, x);
  std::string text;
  for (std::size_t row = 0; row < img.channels * img.height; ++row) {
    for (std::size_t col = 0; col < img.width; ++col) {
      if (col) text += ",";
      text += num(img.data[row * img.width + col], "%.9g");
    }
    text += "\n";
  }
  write_file(out_csv, text);
  say(v, 1, "repr: " + std::string(to_string(r)) + " " + std::to_string(img.channels) + "x" +
                std::to_string(img.height) + "x" + std::to_string(img.width) + " -> " + out_csv.string());
}

}  // namespace radarmon::cli

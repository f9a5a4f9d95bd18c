// Acceptance run: checks criteria 1-8 and prints one PASS/FAIL line each.
//
// Criteria 5-7 train full-size S and AP models on an 8000/2000 synthetic
// dataset, which takes the better part of an hour per seed on one core.
// Seeds 1 and 2 are always trained; seed 3 only when the first two do not
// already settle the two-of-three vote.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "radarmon/channel.hpp"
#include "radarmon/dataset.hpp"
#include "radarmon/eval.hpp"
#include "radarmon/nn/layers.hpp"
#include "radarmon/nn/model.hpp"
#include "radarmon/nn/serialize.hpp"
#include "radarmon/nn/train.hpp"
#include "radarmon/represent.hpp"

namespace fs = std::filesystem;
using namespace radarmon;
using nn::ModelVariant;

namespace {

constexpr double kFs = 20e6;
constexpr double kPi = std::numbers::pi;

struct Options {
  fs::path work_dir = "acceptance_work";
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t iterations = 2400;
  std::uint64_t lr_drop_every = 1800;
  std::size_t train_per_class = 4000;
  std::size_t test_per_class = 1000;
  std::size_t sweep_chunks = 200;
  bool reuse = false;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void log(const std::string& s) { std::cerr << "[acceptance] " << s << std::endl; }

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------- 1

struct GradCheck {
  double worst = 0.0;
  std::string where;
  void add(double err, const std::string& name) {
    if (err >= worst) {
      worst = err;
      where = name;
    }
  }
};

void check_conv_layer(GradCheck& gc, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t k = pick(1, 5);
  nn::Conv c{pick(1, 4), k, pick(1, 5), pick(1, 2), pick(0, k / 2 + 1)};
  const nn::Shape3 in{pick(1, 3), pick(k + 1, 9), pick(c.kernel_w + 1, 9)};
  const auto out = nn::output_shape(c, in);
  auto x = oracle::random_values(in.size(), seed + 1);
  auto w = oracle::random_values(c.out_channels * in.c * c.kernel_h * c.kernel_w, seed + 2);
  auto b = oracle::random_values(c.out_channels, seed + 3);
  const auto r = oracle::random_values(out.size(), seed + 4);
  std::vector<double> y(out.size()), dw(w.size(), 0.0), db(b.size(), 0.0), dx(x.size(), 0.0);
  const auto f = [&] {
    nn::conv_forward(c, in, x, w, b, y);
    return dot(y, r);
  };
  nn::conv_backward(c, in, x, w, r, dw, db, dx, 1.0);
  const auto name = "conv " + nn::describe(c) + " on " + nn::to_string(in);
  gc.add(oracle::max_relative_error(dw, oracle::numeric_gradient(f, w)), name + " dW");
  gc.add(oracle::max_relative_error(db, oracle::numeric_gradient(f, b)), name + " db");
  gc.add(oracle::max_relative_error(dx, oracle::numeric_gradient(f, x)), name + " dx");
}

void check_relu_layer(GradCheck& gc, std::uint64_t seed) {
  auto x = oracle::random_values(200, seed);
  const auto r = oracle::random_values(200, seed + 1);
  std::vector<double> y(200), dx(200, 0.0);
  const auto f = [&] {
    nn::relu_forward(x, y);
    return dot(y, r);
  };
  nn::relu_forward(x, y);
  nn::relu_backward(y, r, dx);
  gc.add(oracle::max_relative_error(dx, oracle::numeric_gradient(f, x)), "relu");
}

void check_pool_layer(GradCheck& gc, std::uint64_t seed) {
  const nn::MaxPool p{2};
  const nn::Shape3 in{3, 8, 10};
  const auto out = nn::output_shape(p, in);
  auto x = oracle::random_values(in.size(), seed);
  const auto r = oracle::random_values(out.size(), seed + 1);
  std::vector<double> y(out.size()), dx(x.size(), 0.0);
  std::vector<std::uint32_t> arg(out.size());
  const auto f = [&] {
    nn::maxpool_forward(p, in, x, y, arg);
    return dot(y, r);
  };
  f();
  nn::maxpool_backward(arg, r, dx);
  gc.add(oracle::max_relative_error(dx, oracle::numeric_gradient(f, x)), "maxpool");
}

void check_dense_layer(GradCheck& gc, std::uint64_t seed) {
  const std::size_t n_in = 7 + seed % 9, n_out = 2 + seed % 5;
  auto x = oracle::random_values(n_in, seed);
  auto w = oracle::random_values(n_in * n_out, seed + 1);
  auto b = oracle::random_values(n_out, seed + 2);
  const auto r = oracle::random_values(n_out, seed + 3);
  std::vector<double> y(n_out), dw(w.size(), 0.0), db(n_out, 0.0), dx(n_in, 0.0);
  const auto f = [&] {
    nn::dense_forward(x, w, b, y);
    return dot(y, r);
  };
  nn::dense_backward(x, w, r, dw, db, dx, 1.0);
  gc.add(oracle::max_relative_error(dw, oracle::numeric_gradient(f, w)), "dense dW");
  gc.add(oracle::max_relative_error(db, oracle::numeric_gradient(f, b)), "dense db");
  gc.add(oracle::max_relative_error(dx, oracle::numeric_gradient(f, x)), "dense dx");
}

// Softmax is only ever used fused with the cross-entropy loss.
void check_softmax_head(GradCheck& gc, std::uint64_t seed) {
  nn::CnnModel m({1, 1, 6}, {nn::Dense{2}, nn::Softmax{}});
  for (std::size_t t = 0; t < m.params().size(); ++t) {
    const auto v = oracle::random_values(m.params()[t].size(), seed + t, -2.0, 2.0);
    std::copy(v.begin(), v.end(), m.params()[t].values().begin());
  }
  auto x = oracle::random_values(6, seed + 9);
  for (int label : {0, 1}) {
    nn::Tensor xt({1, 1, 6}, x);
    const auto g = nn::backward(m, xt, label, true);
    const auto f = [&] { return oracle::mean_loss(m, {x}, {label}); };
    gc.add(oracle::max_relative_error(g.input.values(), oracle::numeric_gradient(f, x)), "softmax+xent dx");
    for (std::size_t t = 0; t < m.params().size(); ++t) {
      gc.add(oracle::max_relative_error(g.params[t].values(), oracle::numeric_gradient(f, m.params()[t].values())),
             "softmax+xent param " + std::to_string(t));
    }
  }
}

void check_full_model(GradCheck& gc, ModelVariant v, std::uint64_t seed) {
  const nn::Architecture narrow{{2, 2, 2, 2, 2}, 4};
  auto m = nn::build_model(v, narrow, seed);
  // Nonzero biases keep pre-activations of constant receptive fields off the ReLU kink.
  for (std::size_t t = 1; t < m.params().size(); t += 2) {
    const auto b = oracle::random_values(m.params()[t].size(), seed * 100 + t, -0.1, 0.1);
    std::copy(b.begin(), b.end(), m.params()[t].values().begin());
  }
  auto x = oracle::random_values(m.input_shape().size(), seed + 5, 0.0, 1.0);
  const int label = static_cast<int>(seed % 2);
  const auto s = m.input_shape();
  nn::Tensor xt({s.c, s.h, s.w}, x);
  const auto g = nn::backward(m, xt, label, true);
  const auto f = [&] { return oracle::mean_loss(m, {x}, {label}); };
  const std::string name(nn::to_string(v));
  for (std::size_t t = 0; t < m.params().size(); ++t) {
    gc.add(oracle::max_relative_error(g.params[t].values(), oracle::numeric_gradient(f, m.params()[t].values())),
           name + " param tensor " + std::to_string(t));
  }
  // Every parameter is checked; the input gradient on a random subset of coordinates.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::vector<double> analytic, numeric;
  for (int k = 0; k < 512; ++k) {
    const auto i = pick(rng);
    numeric.push_back(oracle::numeric_gradient(f, std::span<double>(&x[i], 1))[0]);
    analytic.push_back(g.input[i]);
  }
  gc.add(oracle::max_relative_error(analytic, numeric), name + " input");
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  GradCheck gc;
  for (std::uint64_t s = 0; s < 12; ++s) check_conv_layer(gc, 1000 + 10 * s);
  for (std::uint64_t s = 0; s < 4; ++s) {
    check_relu_layer(gc, 2000 + s);
    check_pool_layer(gc, 3000 + s);
    check_dense_layer(gc, 4000 + s);
    check_softmax_head(gc, 5000 + 10 * s);
  }
  for (auto v : {ModelVariant::S, ModelVariant::A, ModelVariant::P, ModelVariant::AP}) check_full_model(gc, v, 7);
  const double secs = seconds_since(t0);
  return {gc.worst < 1e-4 && secs < 60.0,
          fmt("max relative error %.3g (%s), %.1f s", gc.worst, gc.where.c_str(), secs)};
}

// ---------------------------------------------------------------- 2

Outcome criterion2() {
  struct Case {
    nn::Conv c;
    nn::Shape3 in;
  };
  const std::vector<Case> cases{
      {{32, 11, 11, 1, 5}, {1, 64, 64}}, {{32, 11, 11, 1, 5}, {2, 64, 64}}, {{32, 11, 11, 1, 5}, {1, 32, 32}},
      {{32, 5, 5, 1, 2}, {32, 32, 32}},  {{64, 3, 3, 1, 1}, {32, 16, 16}},  {{64, 3, 3, 1, 1}, {64, 8, 8}},
      {{3, 4, 2, 2, 1}, {2, 9, 7}},      {{5, 3, 3, 3, 0}, {4, 11, 13}},    {{1, 1, 1, 1, 0}, {1, 1, 1}},
  };
  std::size_t conv_mismatch = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [c, in] = cases[i];
    const auto out = nn::output_shape(c, in);
    const auto x = oracle::random_integers(in.size(), 10 * i + 1);
    const auto w = oracle::random_integers(c.out_channels * in.c * c.kernel_h * c.kernel_w, 10 * i + 2);
    const auto b = oracle::random_integers(c.out_channels, 10 * i + 3);
    std::vector<double> y(out.size());
    nn::conv_forward(c, in, x, w, b, y);
    const auto ref = oracle::conv(c, in, x, w, b);
    for (std::size_t k = 0; k < y.size(); ++k) conv_mismatch += y[k] != ref[k];
  }

  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = oracle::random_samples(kChunkLen, 50000 + s, 0.1 + 0.05 * static_cast<double>(s));
    const auto fast = dft_mag(x);
    const auto slow = oracle::direct_dft_mag_shifted(x);
    const double peak = *std::max_element(slow.begin(), slow.end());
    for (std::size_t k = 0; k < kChunkLen; ++k) {
      worst = std::max(worst, std::abs(fast[k] - slow[k]) / std::max(slow[k], 1e-12 * peak));
    }
  }
  return {conv_mismatch == 0 && worst < 1e-6,
          fmt("conv: %zu mismatching outputs over %zu integer cases; dft_mag: max relative error %.3g over 100 chunks",
              conv_mismatch, cases.size(), worst)};
}

// ---------------------------------------------------------------- 3

std::vector<IqChunk> assorted_chunks() {
  std::vector<IqChunk> out;
  for (std::uint64_t s = 0; s < 40; ++s) {
    out.push_back(make_chunk(oracle::random_samples(kChunkLen, 70000 + s), std::vector<bool>(kChunkLen, false)));
  }
  ScenarioConfig cfg;
  cfg.train_per_class = 30;
  cfg.test_per_class = 1;
  cfg.seed = 99;
  cfg.workers = workers();
  const auto ds = build_dataset(cfg);
  out.insert(out.end(), ds.train.begin(), ds.train.end());
  return out;
}

Outcome criterion3() {
  const auto chunks = assorted_chunks();
  double amp_err = 0.0, ap0_err = 0.0, scale_err = 0.0, tone_err = 0.0;
  std::size_t pow2_mismatch = 0;
  for (const auto& c : chunks) {
    const SampleStream s{c.samples, kFs, {}};
    const auto a = amplitude(c.samples);
    const auto t = ap_tensor(c.samples);
    for (double f : {-6e6, -3e6, 3e6, 6e6, 1.234e6}) {
      const auto rotated = apply_cfo(s, f).samples;
      const auto b = amplitude(rotated);
      for (std::size_t n = 0; n < a.size(); ++n) amp_err = std::max(amp_err, std::abs(a[n] - b[n]) / std::max(a[n], 1e-300));
      const auto u = ap_tensor(rotated);
      for (std::size_t i = 0; i < 64 * 64; ++i) ap0_err = std::max(ap0_err, std::abs(t.data[i] - u.data[i]));
    }
    for (double k : {2.0, 0.125, 4096.0}) {
      auto y = c.samples;
      for (auto& v : y) v *= k;
      pow2_mismatch += !(ap_tensor(y) == t);
    }
    for (double k : {0.37, 3.0, 1.7e4}) {
      auto y = c.samples;
      for (auto& v : y) v *= k;
      const auto u = ap_tensor(y);
      for (std::size_t i = 0; i < u.data.size(); ++i) scale_err = std::max(scale_err, std::abs(u.data[i] - t.data[i]));
    }
  }
  for (double f : {-6e6, -3e6, 0.0, 3e6, 6e6}) {
    const auto d = phase_diff(oracle::tone(kChunkLen, f, kFs));
    for (std::size_t n = 1; n < d.size(); ++n) tone_err = std::max(tone_err, std::abs(d[n] - 2.0 * kPi * f / kFs));
  }
  const bool pass = amp_err < 1e-12 && ap0_err < 1e-12 && pow2_mismatch == 0 && scale_err < 1e-12 && tone_err < 1e-9;
  return {pass, fmt("%zu chunks: CFO amplitude rel err %.2g, AP ch0 err %.2g; power-of-2 scaling mismatches %zu, "
                    "other scaling err %.2g; tone phase err %.2g",
                    chunks.size(), amp_err, ap0_err, pow2_mismatch, scale_err, tone_err)};
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  std::vector<IqChunk> chunks;
  std::mt19937_64 rng(4);
  std::size_t total = 0;
  for (std::uint64_t c = 0; c < 120; ++c) {
    std::vector<IqSample> x(kChunkLen);
    std::vector<bool> mask(kChunkLen, false);
    const auto start = std::uniform_int_distribution<std::size_t>(0, kChunkLen - 200)(rng);
    for (std::size_t n = start; n < start + 200; ++n) {
      x[n] = std::polar(1.0, 2.0 * kPi * 1e6 * static_cast<double>(n) / kFs);
      mask[n] = true;
    }
    add_awgn(x, 0.1, 400 + c);
    total += x.size();
    chunks.push_back(make_chunk(std::move(x), std::move(mask)));
  }
  const double est = estimate_psnr(chunks);
  double scale_err = 0.0;
  std::size_t pow2_mismatch = 0;
  for (double k : {0.5, 8.0, 0.31, 12.5, 1e3}) {
    auto scaled = chunks;
    for (auto& c : scaled) {
      for (auto& v : c.samples) v *= k;
    }
    const double e = estimate_psnr(scaled);
    if (std::log2(k) == std::round(std::log2(k))) pow2_mismatch += e != est;
    scale_err = std::max(scale_err, std::abs(e - est));
  }
  return {std::abs(est - 10.0) <= 0.2 && pow2_mismatch == 0 && scale_err < 1e-9,
          fmt("%zu samples: estimate %.4f dB; scaling: power-of-2 mismatches %zu, max change %.2g dB", total, est,
              pow2_mismatch, scale_err)};
}

// ---------------------------------------------------------------- 5-7

struct SeedResult {
  std::uint64_t seed = 0;
  std::map<std::string, double> accuracy;
  std::map<std::string, double> train_seconds;
  std::map<std::string, bool> reused;
  std::vector<PdCurve> curves;
};

nn::TrainOptions train_options(const Options& o, std::uint64_t seed) {
  nn::TrainOptions t;
  t.sgd.iterations = o.iterations;
  t.sgd.batch_size = 50;
  t.sgd.lr_drop_every = o.lr_drop_every;
  t.seed = seed;
  return t;
}

SeedResult run_seed(const Options& o, std::uint64_t seed, const Dataset& ds, const std::vector<PsnrSet>& sets) {
  SeedResult r;
  r.seed = seed;
  const auto dir = o.work_dir / ("seed" + std::to_string(seed));
  fs::create_directories(dir);
  std::vector<EvalReport> reports;
  for (auto v : {ModelVariant::S, ModelVariant::AP}) {
    const std::string name(nn::to_string(v));
    const auto model_path = dir / (name + ".model");
    const auto info_path = dir / (name + ".json");
    nn::CnnModel model = nn::build_model(v);
    if (o.reuse && fs::exists(model_path) && fs::exists(info_path)) {
      model = nn::load_model(model_path);
      std::ifstream in(info_path);
      r.train_seconds[name] = nlohmann::json::parse(in).at("train_seconds").get<double>();
      r.reused[name] = true;
      log(fmt("seed %llu %s: reusing %s", static_cast<unsigned long long>(seed), name.c_str(), model_path.c_str()));
    } else {
      auto opt = train_options(o, seed);
      const auto t0 = Clock::now();
      opt.on_iteration = [&](std::uint64_t it, double loss, double lr) {
        if ((it + 1) % 100 == 0) {
          log(fmt("seed %llu %s it %llu loss %.4f lr %g (%.0f s)", static_cast<unsigned long long>(seed), name.c_str(),
                  static_cast<unsigned long long>(it + 1), loss, lr, seconds_since(t0)));
        }
      };
      model = nn::train(v, ds.train, opt).model;
      r.train_seconds[name] = seconds_since(t0);
      nn::save_model(model, model_path);
      std::ofstream(info_path) << nlohmann::json{{"train_seconds", r.train_seconds[name]}}.dump(2) << "\n";
    }
    auto rep = evaluate(model, ds.test);
    r.accuracy[name] = rep.accuracy;
    log(fmt("seed %llu %s: test accuracy %.4f, training %.0f s", static_cast<unsigned long long>(seed), name.c_str(),
            rep.accuracy, r.train_seconds[name]));
    reports.push_back(std::move(rep));
    for (auto& c : pd_curves(model, sets)) r.curves.push_back(std::move(c));
  }
  emit_curves(reports, r.curves, dir / "curves");
  return r;
}

const PdCurve* find_curve(const SeedResult& r, const std::string& model, const std::string& waveform) {
  for (const auto& c : r.curves) {
    if (c.model == model && c.waveform == waveform) return &c;
  }
  return nullptr;
}

double low_psnr_mean(const PdCurve& c, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += c.points[i].pd;
  return s / static_cast<double>(k);
}

bool c5_ok(const SeedResult& r, const std::string& m) {
  const double target = m == "AP" ? 0.95 : 0.90;
  return r.accuracy.at(m) >= target && r.train_seconds.at(m) <= 1800.0;
}

bool c6_ok(const SeedResult& r) {
  const auto* s = find_curve(r, "S", "pc2");
  const auto* ap = find_curve(r, "AP", "pc2");
  return s && ap && low_psnr_mean(*ap, 3) >= low_psnr_mean(*s, 3);
}

struct TrainingOutcomes {
  Outcome c5, c6, c7;
};

TrainingOutcomes criteria567(const Options& o) {
  ScenarioConfig cfg;
  cfg.train_per_class = o.train_per_class;
  cfg.test_per_class = o.test_per_class;
  cfg.seed = 2024;
  cfg.workers = workers();
  auto t0 = Clock::now();
  const auto ds = build_dataset(cfg);
  std::set<std::string> waveforms;
  std::set<Scenario> scenarios;
  for (const auto& e : ds.train_entries) {
    if (e.radar) waveforms.insert(e.radar->waveform);
    scenarios.insert(e.provenance);
  }
  log(fmt("dataset %zu/%zu chunks, %zu waveforms, %zu scenarios, %.1f s", ds.train.size(), ds.test.size(),
          waveforms.size(), scenarios.size(), seconds_since(t0)));

  PsnrSweepConfig sweep;
  sweep.chunks_per_set = o.sweep_chunks;
  sweep.seed = 2025;
  sweep.workers = workers();
  t0 = Clock::now();
  const auto sets = build_psnr_sets(sweep);
  log(fmt("psnr sweep: %zu sets, %.1f s", sets.size(), seconds_since(t0)));

  std::vector<SeedResult> results;
  auto votes = [&](auto pred) {
    std::size_t n = 0;
    for (const auto& r : results) n += pred(r);
    return n;
  };
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    if (seed == 3) {
      const bool settled = votes([](const SeedResult& r) { return c5_ok(r, "S"); }) >= 2 &&
                           votes([](const SeedResult& r) { return c5_ok(r, "AP"); }) >= 2 &&
                           votes(c6_ok) >= 2;
      if (settled) {
        log("seeds 1 and 2 settle criteria 5 and 6; seed 3 not trained");
        break;
      }
    }
    results.push_back(run_seed(o, seed, ds, sets));
  }

  TrainingOutcomes out;
  const bool spans = waveforms.size() == reference_waveforms().size() && scenarios.size() == 6;
  std::string d5 = fmt("%zu train / %zu test, %llu iterations, batch 50;", ds.train.size(), ds.test.size(),
                       static_cast<unsigned long long>(o.iterations));
  std::string d6;
  for (const auto& r : results) {
    d5 += fmt(" seed %llu S %.4f (%.0f s) AP %.4f (%.0f s);", static_cast<unsigned long long>(r.seed),
              r.accuracy.at("S"), r.train_seconds.at("S"), r.accuracy.at("AP"), r.train_seconds.at("AP"));
    const auto* s = find_curve(r, "S", "pc2");
    const auto* ap = find_curve(r, "AP", "pc2");
    if (s && ap) d6 += fmt(" seed %llu AP %.3f vs S %.3f;", static_cast<unsigned long long>(r.seed), low_psnr_mean(*ap, 3),
                           low_psnr_mean(*s, 3));
  }
  const auto s_votes = votes([](const SeedResult& r) { return c5_ok(r, "S"); });
  const auto ap_votes = votes([](const SeedResult& r) { return c5_ok(r, "AP"); });
  out.c5 = {spans && s_votes >= 2 && ap_votes >= 2,
            d5 + fmt(" seeds meeting target: S %zu, AP %zu", s_votes, ap_votes)};
  const auto c6_votes = votes(c6_ok);
  out.c6 = {c6_votes >= 2, fmt("pc2 mean Pd over lowest 3 of %zu PSNR points:", sweep.psnr_db.size()) + d6 +
                               fmt(" seeds with AP >= S: %zu", c6_votes)};

  double worst = 1.0;
  std::string worst_at;
  std::size_t curves = 0;
  for (const auto& r : results) {
    for (const auto& c : r.curves) {
      std::vector<double> x, y;
      for (const auto& p : c.points) {
        x.push_back(p.psnr_db);
        y.push_back(p.pd);
      }
      const double rho = spearman(x, y);
      ++curves;
      if (rho <= worst) {
        worst = rho;
        worst_at = fmt("seed %llu %s/%s", static_cast<unsigned long long>(r.seed), c.model.c_str(), c.waveform.c_str());
      }
    }
  }
  out.c7 = {curves > 0 && worst > 0.9, fmt("%zu curves, minimum Spearman %.4f (%s)", curves, worst, worst_at.c_str())};
  return out;
}

// ---------------------------------------------------------------- 8

void pipeline(const fs::path& dir, std::size_t threads) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  ScenarioConfig cfg;
  cfg.train_per_class = 100;
  cfg.test_per_class = 50;
  cfg.seed = 8;
  cfg.workers = threads;
  write_dataset(build_dataset(cfg), dir / "dataset");
  const auto ds = load_dataset(dir / "dataset" / "manifest.json");

  PsnrSweepConfig sweep;
  sweep.psnr_db = {-6.0, 0.0, 6.0};
  sweep.chunks_per_set = 20;
  sweep.seed = 8;
  sweep.workers = threads;
  write_psnr_sets(build_psnr_sets(sweep), dir / "psnr");
  const auto sets = load_psnr_sets(dir / "psnr" / "psnr_sets.json");

  std::vector<EvalReport> reports;
  std::vector<PdCurve> curves;
  for (auto v : {ModelVariant::S, ModelVariant::AP}) {
    nn::TrainOptions opt;
    opt.sgd.iterations = 15;
    opt.sgd.batch_size = 10;
    opt.seed = 1;
    const auto model = nn::train(v, ds.train, opt).model;
    nn::save_model(model, dir / (std::string(nn::to_string(v)) + ".model"));
    reports.push_back(evaluate(model, ds.test));
    for (auto& c : pd_curves(model, sets)) curves.push_back(std::move(c));
  }
  emit_curves(reports, curves, dir / "curves");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

Outcome criterion8(const Options& o) {
  const auto base = o.work_dir / "determinism";
  pipeline(base / "run_a", 1);
  pipeline(base / "run_b", 4);
  const auto a = snapshot(base / "run_a");
  const auto b = snapshot(base / "run_b");
  std::size_t differ = 0;
  std::string first;
  std::size_t manifests = 0, models = 0, curves = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (first.empty()) first = name;
      ++differ;
    }
    manifests += name.ends_with(".json");
    models += name.ends_with(".model");
    curves += name.starts_with("curves");
  }
  const bool same_set = a.size() == b.size();
  return {same_set && differ == 0 && manifests > 0 && models == 2 && curves > 0,
          fmt("%zu files (%zu manifests, %zu models, %zu curve files), %zu differ%s", a.size(), manifests, models,
              curves, differ, first.empty() ? "" : (", first " + first).c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Runs the acceptance criteria and prints one PASS/FAIL line per criterion."};
  app.add_option("--work-dir", o.work_dir, "Directory for models, curves and scratch files");
  app.add_option("--criteria", o.criteria, "Subset of criteria to run")->check(CLI::Range(1, 8));
  app.add_option("--iterations", o.iterations, "Training iterations per model");
  app.add_option("--lr-drop-every", o.lr_drop_every, "Iterations between learning-rate drops");
  app.add_option("--train-per-class", o.train_per_class, "Training chunks per class");
  app.add_option("--test-per-class", o.test_per_class, "Test chunks per class");
  app.add_option("--sweep-chunks", o.sweep_chunks, "Chunks per PSNR sweep point");
  app.add_flag("--reuse", o.reuse, "Load models left by an earlier run instead of retraining");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(o.work_dir);
  const std::set<int> wanted(o.criteria.begin(), o.criteria.end());
  std::map<int, Outcome> results;
  const auto run = [&](int id, auto fn) {
    if (!wanted.count(id)) return;
    const auto t0 = Clock::now();
    try {
      results[id] = fn();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("exception: ") + e.what()};
    }
    log(fmt("criterion %d done in %.1f s", id, seconds_since(t0)));
  };
  run(1, criterion1);
  run(2, criterion2);
  run(3, criterion3);
  run(4, criterion4);
  run(8, [&] { return criterion8(o); });
  if (wanted.count(5) || wanted.count(6) || wanted.count(7)) {
    const auto t0 = Clock::now();
    try {
      const auto t = criteria567(o);
      results[5] = t.c5;
      results[6] = t.c6;
      results[7] = t.c7;
    } catch (const std::exception& e) {
      for (int id : {5, 6, 7}) results[id] = {false, std::string("exception: ") + e.what()};
    }
    log(fmt("criteria 5-7 done in %.1f s", seconds_since(t0)));
  }

  bool all = true;
  nlohmann::json summary = nlohmann::json::object();
  for (int id = 1; id <= 8; ++id) {
    const auto it = results.find(id);
    if (it == results.end()) continue;
    all = all && it->second.pass;
    std::cout << "criterion " << id << ": " << (it->second.pass ? "PASS" : "FAIL") << "  " << it->second.detail
              << std::endl;
    summary[std::to_string(id)] = {{"pass", it->second.pass}, {"detail", it->second.detail}};
  }
  std::ofstream(o.work_dir / "summary.json") << summary.dump(2) << "\n";
  return all ? 0 : 1;
}

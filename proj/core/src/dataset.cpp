#include "radarmon/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "radarmon/channel.hpp"
#include "radarmon/error.hpp"
#include "radarmon/rng.hpp"

namespace radarmon {

namespace {

using nlohmann::json;

constexpr int kMaxAttempts = 64;
constexpr std::string_view kManifestFormat = "radarmon-dataset";
constexpr std::string_view kPsnrFormat = "radarmon-psnr-sets";
constexpr int kManifestVersion = 1;
constexpr std::uint64_t kPsnrStream = 0x50534e52ULL << 32;

// Shared inputs of the per-entry generator; both the dataset and the PSNR
// sweep reduce to this.
struct GenContext {
  const std::vector<WaveformSpec>* waveforms = nullptr;
  const std::vector<double>* offsets_hz = nullptr;
  double fs = kDefaultSampleRate;
  double pri_s = 1e-3;
  ChannelRanges channel{};
  PulseJitter jitter{};
  std::size_t min_radar_samples = 8;
  double psnr_min_db = 0.0;
  double psnr_max_db = 0.0;
  double sir_min_db = 0.0;
  double sir_max_db = 0.0;
  double su_snr_min_db = 0.0;
  double su_snr_max_db = 0.0;
  const WlanParams* wlan = nullptr;
  const LteParams* lte = nullptr;
  const std::vector<double>* lte_bandwidths_hz = nullptr;
  double lte_load_min = 0.0;
  double lte_load_max = 1.0;
};

struct Request {
  Scenario scenario = Scenario::Noise;
  std::optional<std::size_t> waveform;  // forced waveform index
  std::optional<double> psnr_db;        // forced PSNR
};

struct Generated {
  IqChunk chunk;
  std::optional<RadarDraw> radar;
  std::optional<double> psnr_db;
};

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class T>
std::size_t pick_index(Rng& rng, const std::vector<T>& v) {
  return std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng);
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

bool has_radar(Scenario s) {
  return s == Scenario::RadarOnly || s == Scenario::RadarWlan || s == Scenario::RadarLte;
}

SampleStream through_channel(SampleStream s, const ChannelRanges& ch, Rng& rng) {
  if (!ch.multipath) return s;
  const auto taps = random_two_path(rng, ch.max_echo, ch.min_delay, ch.max_delay);
  return apply_multipath(s, taps);
}

std::size_t emitter_overlap(const SampleStream& s, Emitter e, std::int64_t lo, std::int64_t hi) {
  std::size_t n = 0;
  for (const auto& a : s.annotations) {
    if (a.emitter != e) continue;
    const auto b = std::max(lo, a.start_idx);
    const auto t = std::min(hi, a.end_idx());
    if (t > b) n += static_cast<std::size_t>(t - b);
  }
  return n;
}

// One attempt at an entry; nullopt when the chunk misses a content requirement.
std::optional<Generated> try_generate(const GenContext& ctx, const Request& req, Rng& rng) {
  const auto total = static_cast<std::int64_t>(std::llround(ctx.pri_s * ctx.fs));
  const double psnr = req.psnr_db ? *req.psnr_db : uniform(rng, ctx.psnr_min_db, ctx.psnr_max_db);
  const double noise_power = std::isinf(psnr) && psnr > 0 ? 0.0 : db_to_power(-psnr);

  std::vector<SampleStream> parts;
  Generated out;

  if (has_radar(req.scenario)) {
    const auto wi = req.waveform ? *req.waveform : pick_index(rng, *ctx.waveforms);
    const auto& w = (*ctx.waveforms)[wi];
    const double offset = (*ctx.offsets_hz)[pick_index(rng, *ctx.offsets_hz)];
    const auto pw_n = static_cast<std::int64_t>(std::llround(w.pw_s * ctx.fs));
    const std::int64_t margin = ctx.jitter.toa_samples;
    const auto toa = std::uniform_int_distribution<std::int64_t>(margin, total - pw_n - margin - 1)(rng);
    RadarParams p;
    p.ipm = w.ipm;
    p.pw_s = w.pw_s;
    p.pri_s = ctx.pri_s;
    p.carrier_offset_hz = offset;
    p.amplitude_profile = ConstantAmplitude{1.0};
    p.jitter = ctx.jitter;
    p.first_toa_s = static_cast<double>(toa) / ctx.fs;
    auto radar = synth_pulse_train(p, ctx.pri_s, ctx.fs, rng());
    parts.push_back(through_channel(std::move(radar), ctx.channel, rng));
    out.radar = RadarDraw{w.name, offset, w.pw_s};
    out.psnr_db = psnr;
  }

  const bool wants_wlan = req.scenario == Scenario::RadarWlan || req.scenario == Scenario::WlanOnly;
  const bool wants_lte = req.scenario == Scenario::RadarLte || req.scenario == Scenario::LteOnly;
  if (wants_wlan || wants_lte) {
    const double su_power = has_radar(req.scenario)
                                ? db_to_power(-uniform(rng, ctx.sir_min_db, ctx.sir_max_db))
                                : std::max(noise_power, 1e-12) * db_to_power(uniform(rng, ctx.su_snr_min_db,
                                                                                     ctx.su_snr_max_db));
    SampleStream su;
    if (wants_wlan) {
      WlanParams wp = *ctx.wlan;
      wp.power = su_power;
      su = synth_wlan(wp, ctx.pri_s, ctx.fs, rng());
    } else {
      LteParams lp = *ctx.lte;
      lp.power = su_power;
      lp.bandwidth_hz = (*ctx.lte_bandwidths_hz)[pick_index(rng, *ctx.lte_bandwidths_hz)];
      lp.load = uniform(rng, ctx.lte_load_min, ctx.lte_load_max);
      su = synth_lte(lp, ctx.pri_s, ctx.fs, rng());
    }
    parts.push_back(through_channel(std::move(su), ctx.channel, rng));
  }

  SampleStream mixed;
  if (parts.empty()) {
    mixed.sample_rate_hz = ctx.fs;
    mixed.samples.assign(static_cast<std::size_t>(total), IqSample{});
    add_awgn(mixed.samples, noise_power, rng());
  } else {
    const std::vector<double> gains(parts.size(), 1.0);
    mixed = mix(parts, gains, noise_power, rng());
  }
  quantize_to_storage(mixed.samples);

  auto chunks = chunk_stream(mixed, kChunkLen, req.scenario);
  const auto window = [](std::size_t c) {
    return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(c * kChunkLen),
                                                 static_cast<std::int64_t>((c + 1) * kChunkLen)};
  };

  std::size_t chosen = 0;
  if (has_radar(req.scenario)) {
    std::size_t best = 0;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      const auto n = chunks[c].radar_sample_count();
      if (n > best) {
        best = n;
        chosen = c;
      }
    }
    if (best < ctx.min_radar_samples) return std::nullopt;
  } else if (req.scenario == Scenario::WlanOnly) {
    std::size_t best = 0;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      const auto [lo, hi] = window(c);
      const auto n = emitter_overlap(mixed, Emitter::Wlan, lo, hi);
      if (n > best) {
        best = n;
        chosen = c;
      }
    }
  } else {
    chosen = pick_index(rng, chunks);
  }
  if (wants_wlan) {
    const auto [lo, hi] = window(chosen);
    if (emitter_overlap(mixed, Emitter::Wlan, lo, hi) == 0) return std::nullopt;
  }
  out.chunk = std::move(chunks[chosen]);
  return out;
}

Generated generate(const GenContext& ctx, const Request& req, std::uint64_t stream_tag, std::size_t index,
                   std::uint64_t seed) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, stream_tag | static_cast<std::uint64_t>(attempt), index));
    if (auto g = try_generate(ctx, req, rng)) return std::move(*g);
  }
  throw Error("could not generate a " + std::string(to_string(req.scenario)) + " chunk satisfying its content rules in " +
              std::to_string(kMaxAttempts) + " attempts");
}

// Runs body(i) for i in [0, n) on up to `workers` threads. The first
// exception thrown by any call is rethrown once all threads have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto run = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Largest-remainder split of n items by weight.
std::vector<std::size_t> apportion(std::size_t n, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(n) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    used += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++counts[rem[k % rem.size()].second];
  return counts;
}

std::vector<Scenario> scenario_plan(const ScenarioConfig& cfg, std::size_t per_class) {
  const auto present = apportion(per_class, cfg.present_mix);
  const auto absent = apportion(per_class, cfg.absent_mix);
  std::vector<Scenario> plan;
  plan.reserve(2 * per_class);
  const Scenario pk[] = {Scenario::RadarOnly, Scenario::RadarWlan, Scenario::RadarLte};
  const Scenario ak[] = {Scenario::LteOnly, Scenario::WlanOnly, Scenario::Noise};
  for (std::size_t i = 0; i < 3; ++i) plan.insert(plan.end(), present[i], pk[i]);
  for (std::size_t i = 0; i < 3; ++i) plan.insert(plan.end(), absent[i], ak[i]);
  return plan;
}

void check_waveforms(const std::vector<WaveformSpec>& waveforms, double pri_s, double fs) {
  if (waveforms.empty()) throw InvalidArgument("at least one waveform is required");
  for (const auto& w : waveforms) {
    if (w.name.empty()) throw InvalidArgument("waveform names must be non-empty");
    RadarParams p;
    p.ipm = w.ipm;
    p.pw_s = w.pw_s;
    p.pri_s = pri_s;
    p.validate(fs);
    if (std::llround(w.pw_s * fs) < 2) throw InvalidArgument("waveform '" + w.name + "' is shorter than 2 samples");
  }
}

void check_common(double fs, double pri_s, const std::vector<double>& offsets, const ChannelRanges& ch,
                  const PulseJitter& jitter, std::size_t min_radar_samples) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw InvalidArgument("sample_rate_hz must be positive");
  if (!(pri_s > 0.0) || std::llround(pri_s * fs) < static_cast<long long>(kChunkLen)) {
    throw InvalidArgument("pri_s must span at least one chunk");
  }
  if (offsets.empty()) throw InvalidArgument("at least one carrier offset is required");
  for (double f : offsets) {
    if (!(std::abs(f) < fs / 2.0)) throw InvalidArgument("carrier offsets must be below fs/2");
  }
  if (ch.max_echo < 0.0 || ch.max_echo >= 1.0) throw InvalidArgument("channel max_echo must lie in [0, 1)");
  if (ch.min_delay < 1 || ch.max_delay < ch.min_delay) throw InvalidArgument("channel delay range invalid");
  if (jitter.amplitude_frac < 0.0 || jitter.amplitude_frac >= 1.0 || jitter.toa_samples < 0) {
    throw InvalidArgument("jitter must be non-negative with amplitude_frac < 1");
  }
  if (min_radar_samples < 1 || min_radar_samples > kChunkLen) {
    throw InvalidArgument("min_radar_samples must lie in [1, chunk length]");
  }
}

void check_range(double lo, double hi, const char* what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw InvalidArgument(std::string(what) + " range must be finite with min <= max");
  }
}

// Chunk payloads are written as one concatenated stream whose radar
// annotations reproduce the chunk masks.
SampleStream concat_chunks(std::span<const IqChunk> chunks, double fs) {
  SampleStream s;
  s.sample_rate_hz = fs;
  s.samples.reserve(chunks.size() * kChunkLen);
  for (const auto& c : chunks) {
    if (c.samples.size() != kChunkLen || c.radar_mask.size() != kChunkLen) {
      throw ShapeError("dataset chunks must hold " + std::to_string(kChunkLen) + " samples");
    }
    const auto base = static_cast<std::int64_t>(s.samples.size());
    for (std::size_t i = 0; i < kChunkLen;) {
      if (!c.radar_mask[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      double peak = 0.0;
      while (j < kChunkLen && c.radar_mask[j]) peak = std::max(peak, std::abs(c.samples[j++]));
      s.annotations.push_back({base + static_cast<std::int64_t>(i), static_cast<std::int64_t>(j - i), Emitter::Radar,
                               peak});
      i = j;
    }
    s.samples.insert(s.samples.end(), c.samples.begin(), c.samples.end());
  }
  return s;
}

std::vector<IqChunk> split_chunks(const SampleStream& stream, std::size_t expected) {
  if (stream.size() != expected * kChunkLen) {
    throw IoError("payload holds " + std::to_string(stream.size()) + " samples, expected " +
                  std::to_string(expected * kChunkLen));
  }
  if (expected == 0) return {};
  return chunk_stream(stream, kChunkLen, Scenario::Unlabeled);
}

json entry_to_json(const ManifestEntry& e) {
  json j{{"split", to_string(e.split)},
         {"index", e.index},
         {"label", static_cast<int>(e.label)},
         {"provenance", to_string(e.provenance)},
         {"radar_samples", e.radar_samples}};
  if (e.radar) {
    j["radar"] = {{"waveform", e.radar->waveform}, {"offset_hz", e.radar->offset_hz}, {"pw_s", e.radar->pw_s}};
  }
  if (e.psnr_db) j["psnr_db"] = *e.psnr_db;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  const auto split = j.at("split").get<std::string>();
  if (split == "train") {
    e.split = Split::Train;
  } else if (split == "test") {
    e.split = Split::Test;
  } else {
    throw IoError("unknown split '" + split + "'");
  }
  e.index = j.at("index").get<std::size_t>();
  const int label = j.at("label").get<int>();
  if (label != 0 && label != 1) throw IoError("label must be 0 or 1");
  e.label = static_cast<Label>(label);
  e.provenance = scenario_from_string(j.at("provenance").get<std::string>());
  e.radar_samples = j.at("radar_samples").get<std::size_t>();
  if (j.contains("radar")) {
    const auto& r = j["radar"];
    e.radar = RadarDraw{r.at("waveform").get<std::string>(), r.at("offset_hz").get<double>(),
                        r.at("pw_s").get<double>()};
  }
  if (j.contains("psnr_db")) e.psnr_db = j["psnr_db"].get<double>();
  return e;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

json psnr_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double psnr_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw IoError("invalid PSNR value '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::vector<WaveformSpec> reference_waveforms() {
  return {
      {"pc2", Pc{}, 2e-6},
      {"pc10", Pc{}, 10e-6},
      {"lfm10", Lfm{4e6}, 10e-6},
      {"pm10", BarkerPm{}, 10e-6},
  };
}

WaveformSpec waveform_by_name(const std::string& name) {
  for (auto& w : reference_waveforms()) {
    if (w.name == name) return w;
  }
  throw InvalidArgument("unknown waveform '" + name + "' (expected pc2, pc10, lfm10 or pm10)");
}

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

void ScenarioConfig::validate() const {
  check_waveforms(waveforms, pri_s, sample_rate_hz);
  check_common(sample_rate_hz, pri_s, offsets_hz, channel, jitter, min_radar_samples);
  if (train_per_class < 1 || test_per_class < 1) throw InvalidArgument("per-class counts must be at least 1");
  for (const auto* mixw : {&present_mix, &absent_mix}) {
    double sum = 0.0;
    for (double w : *mixw) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("mix weights must be finite and non-negative");
      sum += w;
    }
    if (!(sum > 0.0)) throw InvalidArgument("mix weights must not all be zero");
  }
  check_range(psnr_min_db, psnr_max_db, "psnr_db");
  check_range(sir_min_db, sir_max_db, "sir_db");
  check_range(su_snr_min_db, su_snr_max_db, "su_snr_db");
  wlan.validate(sample_rate_hz);
  lte.validate(sample_rate_hz);
  if (lte_bandwidths_hz.empty()) throw InvalidArgument("at least one LTE bandwidth is required");
  for (double bw : lte_bandwidths_hz) {
    LteParams p = lte;
    p.bandwidth_hz = bw;
    p.validate(sample_rate_hz);
  }
  if (!(lte_load_min >= 0.0 && lte_load_max <= 1.0 && lte_load_min <= lte_load_max)) {
    throw InvalidArgument("LTE load range must lie in [0, 1] with min <= max");
  }
}

void PsnrSweepConfig::validate() const {
  check_waveforms(waveforms, pri_s, sample_rate_hz);
  check_common(sample_rate_hz, pri_s, offsets_hz, channel, jitter, min_radar_samples);
  if (psnr_db.empty()) throw InvalidArgument("at least one PSNR level is required");
  for (double p : psnr_db) {
    if (std::isnan(p) || p == -std::numeric_limits<double>::infinity()) {
      throw InvalidArgument("PSNR levels must be numbers or +inf");
    }
  }
  if (chunks_per_set < 1) throw InvalidArgument("chunks_per_set must be at least 1");
}

Dataset build_dataset(const ScenarioConfig& cfg) {
  cfg.validate();
  GenContext ctx;
  ctx.waveforms = &cfg.waveforms;
  ctx.offsets_hz = &cfg.offsets_hz;
  ctx.fs = cfg.sample_rate_hz;
  ctx.pri_s = cfg.pri_s;
  ctx.channel = cfg.channel;
  ctx.jitter = cfg.jitter;
  ctx.min_radar_samples = cfg.min_radar_samples;
  ctx.psnr_min_db = cfg.psnr_min_db;
  ctx.psnr_max_db = cfg.psnr_max_db;
  ctx.sir_min_db = cfg.sir_min_db;
  ctx.sir_max_db = cfg.sir_max_db;
  ctx.su_snr_min_db = cfg.su_snr_min_db;
  ctx.su_snr_max_db = cfg.su_snr_max_db;
  ctx.wlan = &cfg.wlan;
  ctx.lte = &cfg.lte;
  ctx.lte_bandwidths_hz = &cfg.lte_bandwidths_hz;
  ctx.lte_load_min = cfg.lte_load_min;
  ctx.lte_load_max = cfg.lte_load_max;

  Dataset ds;
  ds.seed = cfg.seed;
  for (auto split : {Split::Train, Split::Test}) {
    const auto per_class = split == Split::Train ? cfg.train_per_class : cfg.test_per_class;
    const auto plan = scenario_plan(cfg, per_class);
    auto& chunks = split == Split::Train ? ds.train : ds.test;
    auto& entries = split == Split::Train ? ds.train_entries : ds.test_entries;
    chunks.resize(plan.size());
    entries.resize(plan.size());
    const std::uint64_t tag = static_cast<std::uint64_t>(split) << 16;
    parallel_for(plan.size(), cfg.workers, [&](std::size_t i) {
      auto g = generate(ctx, Request{plan[i], {}, {}}, tag, i, cfg.seed);
      ManifestEntry& e = entries[i];
      e.split = split;
      e.index = i;
      e.label = g.chunk.label;
      e.provenance = plan[i];
      e.radar = std::move(g.radar);
      e.psnr_db = g.psnr_db;
      e.radar_samples = g.chunk.radar_sample_count();
      chunks[i] = std::move(g.chunk);
    });
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  if (dataset.train.size() != dataset.train_entries.size() || dataset.test.size() != dataset.test_entries.size()) {
    throw InvalidArgument("dataset chunks and manifest entries differ in count");
  }
  std::filesystem::create_directories(dir);
  json manifest{{"format", kManifestFormat},
                {"version", kManifestVersion},
                {"seed", dataset.seed},
                {"chunk_len", kChunkLen},
                {"sample_rate_hz", kDefaultSampleRate}};
  for (auto split : {Split::Train, Split::Test}) {
    const auto& chunks = split == Split::Train ? dataset.train : dataset.test;
    const std::string payload = std::string(to_string(split)) + ".iq";
    write_iq_file(concat_chunks(chunks, kDefaultSampleRate), dir / payload);
    manifest["splits"][std::string(to_string(split))] = {{"payload", payload}, {"count", chunks.size()}};
  }
  auto& entries = manifest["entries"] = json::array();
  for (const auto* list : {&dataset.train_entries, &dataset.test_entries}) {
    for (const auto& e : *list) entries.push_back(entry_to_json(e));
  }
  write_json(manifest, dir / "manifest.json");
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const auto manifest = read_json(manifest_path);
  const auto dir = manifest_path.parent_path();
  Dataset ds;
  try {
    if (manifest.at("format").get<std::string>() != kManifestFormat) throw IoError("not a dataset manifest");
    if (manifest.at("version").get<int>() != kManifestVersion) throw IoError("unsupported manifest version");
    if (manifest.at("chunk_len").get<std::size_t>() != kChunkLen) throw IoError("unsupported chunk length");
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    for (const auto& j : manifest.at("entries")) {
      auto e = entry_from_json(j);
      auto& list = e.split == Split::Train ? ds.train_entries : ds.test_entries;
      if (e.index != list.size()) throw IoError("manifest entries out of order");
      list.push_back(std::move(e));
    }
    for (auto split : {Split::Train, Split::Test}) {
      const auto& info = manifest.at("splits").at(std::string(to_string(split)));
      auto& chunks = split == Split::Train ? ds.train : ds.test;
      const auto& entries = split == Split::Train ? ds.train_entries : ds.test_entries;
      if (info.at("count").get<std::size_t>() != entries.size()) throw IoError("split count mismatch");
      chunks = split_chunks(read_iq_file(dir / info.at("payload").get<std::string>()), entries.size());
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        chunks[i].provenance = entries[i].provenance;
        if (chunks[i].label != entries[i].label || chunks[i].radar_sample_count() != entries[i].radar_samples) {
          throw IoError("chunk " + std::to_string(i) + " of " + std::string(to_string(split)) +
                        " disagrees with its manifest entry");
        }
      }
    }
  } catch (const json::exception& e) {
    throw IoError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  }
  return ds;
}

std::vector<PsnrSet> build_psnr_sets(const PsnrSweepConfig& cfg) {
  cfg.validate();
  GenContext ctx;
  ctx.waveforms = &cfg.waveforms;
  ctx.offsets_hz = &cfg.offsets_hz;
  ctx.fs = cfg.sample_rate_hz;
  ctx.pri_s = cfg.pri_s;
  ctx.channel = cfg.channel;
  ctx.jitter = cfg.jitter;
  ctx.min_radar_samples = cfg.min_radar_samples;

  std::vector<PsnrSet> sets;
  sets.reserve(cfg.waveforms.size() * cfg.psnr_db.size());
  for (std::size_t wi = 0; wi < cfg.waveforms.size(); ++wi) {
    for (std::size_t pi = 0; pi < cfg.psnr_db.size(); ++pi) {
      PsnrSet set;
      set.waveform = cfg.waveforms[wi].name;
      set.target_psnr_db = cfg.psnr_db[pi];
      set.chunks.resize(cfg.chunks_per_set);
      const std::uint64_t tag = kPsnrStream | ((wi * cfg.psnr_db.size() + pi) << 16);
      parallel_for(cfg.chunks_per_set, cfg.workers, [&](std::size_t i) {
        set.chunks[i] = generate(ctx, Request{Scenario::RadarOnly, wi, cfg.psnr_db[pi]}, tag, i, cfg.seed).chunk;
      });
      set.measured_psnr_db = estimate_psnr(set.chunks);
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

void write_psnr_sets(std::span<const PsnrSet> sets, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json manifest{{"format", kPsnrFormat}, {"version", kManifestVersion}, {"chunk_len", kChunkLen}};
  auto& list = manifest["sets"] = json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "set_%03zu.iq", i);
    write_iq_file(concat_chunks(sets[i].chunks, kDefaultSampleRate), dir / name);
    list.push_back({{"waveform", sets[i].waveform},
                    {"target_psnr_db", psnr_to_json(sets[i].target_psnr_db)},
                    {"measured_psnr_db", psnr_to_json(sets[i].measured_psnr_db)},
                    {"payload", name},
                    {"count", sets[i].chunks.size()}});
  }
  write_json(manifest, dir / "psnr_sets.json");
}

std::vector<PsnrSet> load_psnr_sets(const std::filesystem::path& manifest_path) {
  const auto manifest = read_json(manifest_path);
  const auto dir = manifest_path.parent_path();
  std::vector<PsnrSet> sets;
  try {
    if (manifest.at("format").get<std::string>() != kPsnrFormat) throw IoError("not a PSNR set manifest");
    if (manifest.at("version").get<int>() != kManifestVersion) throw IoError("unsupported manifest version");
    for (const auto& j : manifest.at("sets")) {
      PsnrSet s;
      s.waveform = j.at("waveform").get<std::string>();
      s.target_psnr_db = psnr_from_json(j.at("target_psnr_db"));
      s.measured_psnr_db = psnr_from_json(j.at("measured_psnr_db"));
      s.chunks = split_chunks(read_iq_file(dir / j.at("payload").get<std::string>()), j.at("count").get<std::size_t>());
      for (auto& c : s.chunks) c.provenance = Scenario::RadarOnly;
      sets.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  }
  return sets;
}

double estimate_psnr(std::span<const IqChunk> chunks) {
  double on = 0.0;
  double off = 0.0;
  std::size_t n_on = 0;
  std::size_t n_off = 0;
  for (const auto& c : chunks) {
    if (c.radar_mask.size() != c.samples.size()) throw InvalidArgument("radar mask length does not match samples");
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      if (c.radar_mask[i]) {
        on += std::norm(c.samples[i]);
        ++n_on;
      } else {
        off += std::norm(c.samples[i]);
        ++n_off;
      }
    }
  }
  if (n_on == 0) throw InvalidArgument("cannot estimate PSNR without radar samples");
  const double floor = n_off > 0 ? off / static_cast<double>(n_off) : 0.0;
  if (floor == 0.0) return std::numeric_limits<double>::infinity();
  const double excess = on / static_cast<double>(n_on) - floor;
  if (!(excess > 0.0)) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(excess / floor);
}

}  // namespace radarmon

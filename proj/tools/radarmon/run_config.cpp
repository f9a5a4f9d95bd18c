#include "run_config.hpp"

#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace radarmon::cli {

namespace {

using json = nlohmann::json;

// A JSON object being consumed field by field. Reading a key marks it as
// known; finish() rejects whatever was left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    out = convert<T>(j_.at(key), child(key));
  }

  template <class T>
  T require(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(child(key), "required");
    return convert<T>(j_.at(key), child(key));
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section section(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), child(key));
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(child(key), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError((path.empty() ? std::string("<root>") : path) + ": " + what);
  }

 private:
  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, double>) {
      // Infinite PSNR points are spelled "inf" since JSON has no literal.
      if (v.is_string() && (v == "inf" || v == "+inf")) return std::numeric_limits<double>::infinity();
      if (!v.is_number()) fail(path, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      const bool negative = v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0;
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && negative)) {
        fail(path, std::is_unsigned_v<T> ? "expected a non-negative integer" : "expected an integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(path, "expected a string");
      return v.get<std::string>();
    } else {
      // std::vector<U>
      if (!v.is_array()) fail(path, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a library validate() and re-labels its complaint with the section path.
template <class F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    Section::fail(path, e.what());
  }
}

template <std::size_t N>
void read_array(Section& s, const char* key, std::array<double, N>& out) {
  std::vector<double> v;
  s.read(key, v);
  if (!s.has(key)) return;
  if (v.size() != N) Section::fail(s.child(key), "expected " + std::to_string(N) + " numbers");
  std::copy(v.begin(), v.end(), out.begin());
}

std::vector<WaveformSpec> waveforms(Section& s, const char* key, std::vector<WaveformSpec> fallback) {
  if (!s.has(key)) return fallback;
  const auto names = s.require<std::vector<std::string>>(key);
  std::vector<WaveformSpec> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    validated(s.child(key) + "[" + std::to_string(i) + "]", [&] { out.push_back(waveform_by_name(names[i])); });
  }
  return out;
}

ChannelSpec parse_channel(Section s) {
  ChannelSpec c;
  s.read("cfo_hz", c.cfo_hz);
  s.read("gain", c.gain);
  if (s.has("taps")) {
    const auto& taps = s.raw("taps");
    if (!taps.is_array()) Section::fail(s.child("taps"), "expected an array");
    c.taps.clear();
    for (std::size_t i = 0; i < taps.size(); ++i) {
      Section t(taps[i], s.child("taps") + "[" + std::to_string(i) + "]");
      Tap tap;
      double re = 1.0, im = 0.0;
      t.read("delay", tap.delay);
      t.read("re", re);
      t.read("im", im);
      tap.gain = {re, im};
      t.finish();
      c.taps.push_back(tap);
    }
  }
  s.finish();
  return c;
}

PulseJitter parse_jitter(Section s) {
  PulseJitter j;
  s.read("amplitude_frac", j.amplitude_frac);
  s.read("toa_samples", j.toa_samples);
  s.finish();
  return j;
}

ChannelRanges parse_channel_ranges(Section s) {
  ChannelRanges c;
  s.read("multipath", c.multipath);
  s.read("max_echo", c.max_echo);
  s.read("min_delay", c.min_delay);
  s.read("max_delay", c.max_delay);
  s.finish();
  return c;
}

void read_wlan_fields(Section& s, WlanParams& w) {
  s.read("bandwidth_hz", w.bandwidth_hz);
  s.read("burst_min_s", w.burst_min_s);
  s.read("burst_max_s", w.burst_max_s);
  s.read("idle_min_s", w.idle_min_s);
  s.read("idle_max_s", w.idle_max_s);
  s.read("center_offsets_hz", w.center_offsets_hz);
  s.read("power", w.power);
}

void read_lte_fields(Section& s, LteParams& l) {
  s.read("bandwidth_hz", l.bandwidth_hz);
  s.read("symbol_len_s", l.symbol_len_s);
  s.read("load", l.load);
  s.read("reference_burst", l.reference_burst);
  s.read("reference_burst_s", l.reference_burst_s);
  s.read("idle_level_db", l.idle_level_db);
  s.read("power", l.power);
}

SynthConfig parse_synth(Section s, std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  s.read("duration_s", c.duration_s);
  s.read("sample_rate_hz", c.sample_rate_hz);
  s.read("noise_power", c.noise_power);
  s.read("seed", c.seed);
  if (!(c.duration_s > 0.0)) Section::fail(s.child("duration_s"), "must be positive");
  if (!(c.sample_rate_hz > 0.0)) Section::fail(s.child("sample_rate_hz"), "must be positive");
  if (!(c.noise_power >= 0.0)) Section::fail(s.child("noise_power"), "must be non-negative");

  if (s.has("radar")) {
    auto r = s.section("radar");
    SynthRadar radar;
    std::string name = "pc2";
    r.read("waveform", name);
    WaveformSpec w;
    validated(r.child("waveform"), [&] { w = waveform_by_name(name); });
    radar.params.ipm = w.ipm;
    radar.params.pw_s = w.pw_s;
    r.read("pw_s", radar.params.pw_s);
    r.read("pri_s", radar.params.pri_s);
    r.read("offset_hz", radar.params.carrier_offset_hz);
    r.read("first_toa_s", radar.params.first_toa_s);
    double amplitude = 1.0;
    r.read("amplitude", amplitude);
    radar.params.amplitude_profile = ConstantAmplitude{amplitude};
    if (r.has("scan")) {
      auto sc = r.section("scan");
      ScanAmplitude scan;
      scan.peak = amplitude;
      sc.read("period_s", scan.period_s);
      sc.read("beamwidth_s", scan.beamwidth_s);
      sc.read("peak", scan.peak);
      sc.read("floor", scan.floor);
      sc.finish();
      radar.params.amplitude_profile = scan;
    }
    if (r.has("jitter")) radar.params.jitter = parse_jitter(r.section("jitter"));
    if (r.has("channel")) radar.channel = parse_channel(r.section("channel"));
    r.finish();
    validated(s.child("radar"), [&] {
      radar.params.validate(c.sample_rate_hz);
      radar.channel.validate();
    });
    c.radar = radar;
  }
  if (s.has("wlan")) {
    auto w = s.section("wlan");
    SynthWlan wlan;
    read_wlan_fields(w, wlan.params);
    if (w.has("channel")) wlan.channel = parse_channel(w.section("channel"));
    w.finish();
    validated(s.child("wlan"), [&] {
      wlan.params.validate(c.sample_rate_hz);
      wlan.channel.validate();
    });
    c.wlan = wlan;
  }
  if (s.has("lte")) {
    auto l = s.section("lte");
    SynthLte lte;
    read_lte_fields(l, lte.params);
    if (l.has("channel")) lte.channel = parse_channel(l.section("channel"));
    l.finish();
    validated(s.child("lte"), [&] {
      lte.params.validate(c.sample_rate_hz);
      lte.channel.validate();
    });
    c.lte = lte;
  }
  s.finish();
  return c;
}

ScenarioConfig parse_dataset(Section s, std::uint64_t seed, std::size_t workers) {
  ScenarioConfig c;
  c.seed = seed;
  c.workers = workers;
  c.waveforms = waveforms(s, "waveforms", c.waveforms);
  s.read("offsets_hz", c.offsets_hz);
  s.read("sample_rate_hz", c.sample_rate_hz);
  s.read("pri_s", c.pri_s);
  s.read("train_per_class", c.train_per_class);
  s.read("test_per_class", c.test_per_class);
  read_array(s, "present_mix", c.present_mix);
  read_array(s, "absent_mix", c.absent_mix);
  s.read("psnr_min_db", c.psnr_min_db);
  s.read("psnr_max_db", c.psnr_max_db);
  s.read("sir_min_db", c.sir_min_db);
  s.read("sir_max_db", c.sir_max_db);
  s.read("su_snr_min_db", c.su_snr_min_db);
  s.read("su_snr_max_db", c.su_snr_max_db);
  if (s.has("wlan")) {
    auto w = s.section("wlan");
    read_wlan_fields(w, c.wlan);
    w.finish();
  }
  if (s.has("lte")) {
    auto l = s.section("lte");
    read_lte_fields(l, c.lte);
    l.finish();
  }
  s.read("lte_bandwidths_hz", c.lte_bandwidths_hz);
  s.read("lte_load_min", c.lte_load_min);
  s.read("lte_load_max", c.lte_load_max);
  if (s.has("channel")) c.channel = parse_channel_ranges(s.section("channel"));
  if (s.has("jitter")) c.jitter = parse_jitter(s.section("jitter"));
  s.read("min_radar_samples", c.min_radar_samples);
  s.read("seed", c.seed);
  s.finish();
  validated("dataset", [&] { c.validate(); });
  return c;
}

PsnrSweepConfig parse_sweep(Section s, std::uint64_t seed, std::size_t workers) {
  PsnrSweepConfig c;
  c.seed = seed;
  c.workers = workers;
  c.waveforms = waveforms(s, "waveforms", c.waveforms);
  s.read("psnr_db", c.psnr_db);
  s.read("chunks_per_set", c.chunks_per_set);
  s.read("offsets_hz", c.offsets_hz);
  s.read("sample_rate_hz", c.sample_rate_hz);
  s.read("pri_s", c.pri_s);
  if (s.has("channel")) c.channel = parse_channel_ranges(s.section("channel"));
  if (s.has("jitter")) c.jitter = parse_jitter(s.section("jitter"));
  s.read("min_radar_samples", c.min_radar_samples);
  s.read("seed", c.seed);
  s.finish();
  validated("psnr_sweep", [&] { c.validate(); });
  return c;
}

TrainConfig parse_train(Section s, std::uint64_t seed) {
  TrainConfig c;
  c.seeds = {seed};
  if (s.has("variants")) {
    const auto names = s.require<std::vector<std::string>>("variants");
    if (names.empty()) Section::fail(s.child("variants"), "must not be empty");
    c.variants.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      validated(s.child("variants") + "[" + std::to_string(i) + "]",
                [&] { c.variants.push_back(nn::variant_from_string(names[i])); });
    }
  }
  s.read("seeds", c.seeds);
  if (c.seeds.empty()) Section::fail(s.child("seeds"), "must not be empty");
  if (s.has("arch")) {
    auto a = s.section("arch");
    std::vector<std::size_t> widths(c.arch.conv_widths.begin(), c.arch.conv_widths.end());
    a.read("conv_widths", widths);
    if (widths.size() != c.arch.conv_widths.size()) Section::fail(a.child("conv_widths"), "expected 5 integers");
    std::copy(widths.begin(), widths.end(), c.arch.conv_widths.begin());
    a.read("dense_width", c.arch.dense_width);
    a.finish();
  }
  if (s.has("optimizer")) {
    auto o = s.section("optimizer");
    o.read("base_lr", c.optimizer.base_lr);
    o.read("momentum", c.optimizer.momentum);
    o.read("weight_decay", c.optimizer.weight_decay);
    o.read("lr_drop_every", c.optimizer.lr_drop_every);
    o.read("lr_drop_factor", c.optimizer.lr_drop_factor);
    o.read("batch_size", c.optimizer.batch_size);
    o.read("iterations", c.optimizer.iterations);
    o.finish();
    validated(s.child("optimizer"), [&] { c.optimizer.validate(); });
  }
  s.finish();
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, std::size_t workers) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: not valid JSON: ") + e.what());
  }
  Section root(j, "");
  RunConfig c;
  root.read("seed", c.seed);
  if (root.has("synth")) c.synth = parse_synth(root.section("synth"), c.seed);
  if (root.has("dataset")) c.dataset = parse_dataset(root.section("dataset"), c.seed, workers);
  if (root.has("psnr_sweep")) c.psnr_sweep = parse_sweep(root.section("psnr_sweep"), c.seed, workers);
  if (root.has("train")) c.train = parse_train(root.section("train"), c.seed);
  if (root.has("eval")) {
    auto e = root.section("eval");
    e.read("threshold", c.eval.threshold);
    e.finish();
    if (!(c.eval.threshold >= 0.0 && c.eval.threshold <= 1.0)) Section::fail("eval.threshold", "must lie in [0, 1]");
  }
  root.finish();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, std::size_t workers) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), workers);
}

}  // namespace radarmon::cli

#include "radarmon/iq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "radarmon/error.hpp"

namespace radarmon {

namespace {

constexpr std::string_view kSidecarFormat = "radarmon-iq";
constexpr int kSidecarVersion = 1;

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace

std::string_view to_string(Emitter e) {
  switch (e) {
    case Emitter::Radar: return "radar";
    case Emitter::Wlan: return "wlan";
    case Emitter::Lte: return "lte";
  }
  return "unknown";
}

Emitter emitter_from_string(std::string_view s) {
  if (s == "radar") return Emitter::Radar;
  if (s == "wlan") return Emitter::Wlan;
  if (s == "lte") return Emitter::Lte;
  throw InvalidArgument("unknown emitter '" + std::string(s) + "'");
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::RadarOnly: return "radar-only";
    case Scenario::RadarWlan: return "radar+wlan";
    case Scenario::RadarLte: return "radar+lte";
    case Scenario::LteOnly: return "lte-only";
    case Scenario::WlanOnly: return "wlan-only";
    case Scenario::Noise: return "noise";
    case Scenario::Unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

Scenario scenario_from_string(std::string_view s) {
  for (auto sc : {Scenario::RadarOnly, Scenario::RadarWlan, Scenario::RadarLte, Scenario::LteOnly,
                  Scenario::WlanOnly, Scenario::Noise, Scenario::Unlabeled}) {
    if (to_string(sc) == s) return sc;
  }
  throw InvalidArgument("unknown scenario '" + std::string(s) + "'");
}

std::string_view to_string(Label l) {
  return l == Label::RadarPresent ? "radar-present" : "radar-absent";
}

void SampleStream::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvalidArgument("sample_rate_hz must be positive and finite");
  }
  for (const auto& s : samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw InvalidArgument("stream contains a non-finite sample");
    }
  }
  const auto n = static_cast<std::int64_t>(samples.size());
  std::map<Emitter, std::int64_t> last_end;
  std::int64_t last_start = 0;
  for (const auto& a : annotations) {
    if (a.start_idx < 0 || a.len < 1 || a.end_idx() > n) {
      throw InvalidArgument("annotation out of stream bounds");
    }
    if (a.start_idx < last_start) throw InvalidArgument("annotations not sorted by start index");
    last_start = a.start_idx;
    auto it = last_end.find(a.emitter);
    if (it != last_end.end() && a.start_idx < it->second) {
      throw InvalidArgument("overlapping annotations for emitter " + std::string(to_string(a.emitter)));
    }
    last_end[a.emitter] = a.end_idx();
  }
}

void normalize_annotations(std::vector<PulseAnnotation>& annotations) {
  std::stable_sort(annotations.begin(), annotations.end(), [](const auto& a, const auto& b) {
    if (a.start_idx != b.start_idx) return a.start_idx < b.start_idx;
    return a.emitter < b.emitter;
  });
  std::vector<PulseAnnotation> out;
  out.reserve(annotations.size());
  std::map<Emitter, std::size_t> open;  // emitter -> index into out of its latest interval
  for (const auto& a : annotations) {
    auto it = open.find(a.emitter);
    if (it != open.end()) {
      auto& prev = out[it->second];
      if (a.start_idx <= prev.end_idx()) {
        const auto end = std::max(prev.end_idx(), a.end_idx());
        prev.len = end - prev.start_idx;
        prev.peak_amplitude = std::max(prev.peak_amplitude, a.peak_amplitude);
        continue;
      }
    }
    open[a.emitter] = out.size();
    out.push_back(a);
  }
  annotations = std::move(out);
}

std::size_t IqChunk::radar_sample_count() const {
  return static_cast<std::size_t>(std::count(radar_mask.begin(), radar_mask.end(), true));
}

IqChunk make_chunk(std::vector<IqSample> samples, std::vector<bool> radar_mask, Scenario provenance) {
  if (samples.size() != radar_mask.size()) {
    throw InvalidArgument("radar mask length does not match sample count");
  }
  IqChunk chunk;
  chunk.samples = std::move(samples);
  chunk.radar_mask = std::move(radar_mask);
  chunk.provenance = provenance;
  chunk.label = chunk.radar_sample_count() > 0 ? Label::RadarPresent : Label::RadarAbsent;
  return chunk;
}

std::vector<IqChunk> chunk_stream(const SampleStream& stream, std::size_t chunk_len, Scenario provenance) {
  if (chunk_len < 2) throw InvalidArgument("chunk_len must be at least 2");
  if (stream.size() < chunk_len) throw InvalidArgument("insufficient samples");

  const std::size_t count = stream.size() / chunk_len;
  std::vector<bool> mask(count * chunk_len, false);
  for (const auto& a : stream.annotations) {
    if (a.emitter != Emitter::Radar) continue;
    const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(a.start_idx, 0));
    const auto hi = std::min<std::size_t>(static_cast<std::size_t>(a.end_idx()), mask.size());
    for (std::size_t i = lo; i < hi; ++i) mask[i] = true;
  }

  std::vector<IqChunk> chunks;
  chunks.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    const auto first = static_cast<std::ptrdiff_t>(c * chunk_len);
    const auto last = first + static_cast<std::ptrdiff_t>(chunk_len);
    chunks.push_back(make_chunk({stream.samples.begin() + first, stream.samples.begin() + last},
                                {mask.begin() + first, mask.begin() + last}, provenance));
  }
  return chunks;
}

void quantize_to_storage(std::span<IqSample> samples) {
  // Works on the interleaved double view: g++ 11 at -O3 with AVX-512 drops
  // the float round trip when it is written per std::complex component.
  auto* v = reinterpret_cast<double*>(samples.data());
  for (std::size_t i = 0; i < 2 * samples.size(); ++i) v[i] = static_cast<double>(static_cast<float>(v[i]));
}

std::filesystem::path sidecar_path(const std::filesystem::path& payload) {
  auto p = payload;
  p += ".json";
  return p;
}

void write_iq_file(const SampleStream& stream, const std::filesystem::path& path) {
  stream.validate();
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    std::vector<std::uint32_t> words;
    words.reserve(stream.size() * 2);
    for (const auto& s : stream.samples) {
      for (float f : {static_cast<float>(s.real()), static_cast<float>(s.imag())}) {
        words.push_back(to_little_endian(std::bit_cast<std::uint32_t>(f)));
      }
    }
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    if (!out) throw IoError("short write to '" + path.string() + "'");
  }

  nlohmann::json meta;
  meta["format"] = kSidecarFormat;
  meta["version"] = kSidecarVersion;
  meta["sample_rate_hz"] = stream.sample_rate_hz;
  meta["sample_count"] = stream.size();
  auto& ann = meta["annotations"] = nlohmann::json::array();
  for (const auto& a : stream.annotations) {
    ann.push_back({{"start_idx", a.start_idx},
                   {"len", a.len},
                   {"emitter", to_string(a.emitter)},
                   {"peak_amplitude", a.peak_amplitude}});
  }
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot open sidecar for '" + path.string() + "'");
  side << meta.dump(2) << '\n';
  if (!side) throw IoError("short write to sidecar of '" + path.string() + "'");
}

SampleStream read_iq_file(const std::filesystem::path& path) {
  const auto side_path = sidecar_path(path);
  if (!std::filesystem::exists(side_path)) {
    throw IoError("missing metadata sidecar '" + side_path.string() + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % sizeof(float) != 0 || (bytes.size() / sizeof(float)) % 2 != 0) {
    throw IoError("truncated IQ payload '" + path.string() + "'");
  }

  SampleStream stream;
  const std::size_t count = bytes.size() / (2 * sizeof(float));
  stream.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t w[2];
    std::memcpy(w, bytes.data() + i * 2 * sizeof(float), sizeof(w));
    const auto re = std::bit_cast<float>(to_little_endian(w[0]));
    const auto im = std::bit_cast<float>(to_little_endian(w[1]));
    stream.samples[i] = {re, im};
  }

  nlohmann::json meta;
  try {
    std::ifstream side(side_path);
    meta = nlohmann::json::parse(side);
    if (meta.at("format").get<std::string>() != kSidecarFormat) throw IoError("unexpected sidecar format");
    if (meta.at("version").get<int>() != kSidecarVersion) throw IoError("unsupported sidecar version");
    stream.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    if (meta.contains("sample_count") && meta["sample_count"].get<std::size_t>() != count) {
      throw IoError("payload holds " + std::to_string(count) + " samples, sidecar declares " +
                    std::to_string(meta["sample_count"].get<std::size_t>()));
    }
    for (const auto& a : meta.at("annotations")) {
      stream.annotations.push_back({a.at("start_idx").get<std::int64_t>(), a.at("len").get<std::int64_t>(),
                                    emitter_from_string(a.at("emitter").get<std::string>()),
                                    a.at("peak_amplitude").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar '" + side_path.string() + "': " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError("malformed sidecar '" + side_path.string() + "': " + e.what());
  }
  try {
    stream.validate();
  } catch (const InvalidArgument& e) {
    throw IoError("invalid stream in '" + path.string() + "': " + e.what());
  }
  return stream;
}

}  // namespace radarmon

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>

#include "oracles.hpp"
#include "radarmon/dataset.hpp"
#include "radarmon/emitters.hpp"
#include "radarmon/error.hpp"

using namespace radarmon;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 5) {
  ScenarioConfig cfg;
  cfg.train_per_class = 45;
  cfg.test_per_class = 15;
  cfg.seed = seed;
  return cfg;
}

const Dataset& shared_dataset() {
  static const Dataset ds = build_dataset(small_config());
  return ds;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("radarmon_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Chunks with a unit-amplitude pulse over `on` samples and complex noise of
// power `noise` everywhere.
std::vector<IqChunk> pulse_chunks(std::size_t count, std::size_t on, double amp, double noise, std::uint64_t seed) {
  std::vector<IqChunk> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<IqSample> x(kChunkLen);
    std::vector<bool> mask(kChunkLen, false);
    for (std::size_t n = 300; n < 300 + on; ++n) {
      x[n] = {amp, 0.0};
      mask[n] = true;
    }
    add_awgn(x, noise, seed + c);
    out.push_back(make_chunk(std::move(x), std::move(mask)));
  }
  return out;
}

}  // namespace

TEST(Dataset, ClassBalancedWithScenarioMix) {
  const auto& ds = shared_dataset();
  ASSERT_EQ(ds.train.size(), 90u);
  ASSERT_EQ(ds.test.size(), 30u);
  for (const auto* split : {&ds.train, &ds.test}) {
    std::size_t zeros = 0;
    std::map<Scenario, std::size_t> by_scenario;
    for (const auto& c : *split) {
      zeros += c.label == Label::RadarPresent;
      ++by_scenario[c.provenance];
    }
    EXPECT_EQ(zeros * 2, split->size());
    for (auto s : {Scenario::RadarOnly, Scenario::RadarWlan, Scenario::RadarLte, Scenario::LteOnly,
                   Scenario::WlanOnly, Scenario::Noise}) {
      EXPECT_EQ(by_scenario[s] * 6, split->size()) << to_string(s);
    }
  }
}

TEST(Dataset, LabelsFollowMasks) {
  const auto& ds = shared_dataset();
  for (const auto* split : {&ds.train, &ds.test}) {
    for (const auto& c : *split) {
      ASSERT_EQ(c.size(), kChunkLen);
      ASSERT_EQ(c.radar_mask.size(), kChunkLen);
      const auto n = c.radar_sample_count();
      if (c.label == Label::RadarPresent) {
        EXPECT_GE(n, 8u);
        EXPECT_TRUE(c.provenance == Scenario::RadarOnly || c.provenance == Scenario::RadarWlan ||
                    c.provenance == Scenario::RadarLte);
      } else {
        EXPECT_EQ(n, 0u);
      }
    }
  }
}

TEST(Dataset, ManifestDescribesEveryChunk) {
  const auto& ds = shared_dataset();
  ASSERT_EQ(ds.train_entries.size(), ds.train.size());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    const auto& e = ds.train_entries[i];
    EXPECT_EQ(e.index, i);
    EXPECT_EQ(e.split, Split::Train);
    EXPECT_EQ(e.label, ds.train[i].label);
    EXPECT_EQ(e.provenance, ds.train[i].provenance);
    EXPECT_EQ(e.radar_samples, ds.train[i].radar_sample_count());
    EXPECT_EQ(e.radar.has_value(), e.label == Label::RadarPresent);
    if (e.radar) {
      EXPECT_NO_THROW(waveform_by_name(e.radar->waveform));
      ASSERT_TRUE(e.psnr_db.has_value());
      EXPECT_GE(*e.psnr_db, 0.0);
      EXPECT_LE(*e.psnr_db, 20.0);
    }
  }
}

TEST(Dataset, SamplesSitOnStorageGrid) {
  for (const auto& c : shared_dataset().test) {
    for (const auto& x : c.samples) {
      EXPECT_EQ(static_cast<double>(static_cast<float>(x.real())), x.real());
      EXPECT_EQ(static_cast<double>(static_cast<float>(x.imag())), x.imag());
    }
  }
}

TEST(Dataset, SplitsShareNoChunk) {
  const auto& ds = shared_dataset();
  std::set<std::vector<float>> train;
  const auto key = [](const IqChunk& c) {
    std::vector<float> k;
    for (const auto& x : c.samples) {
      k.push_back(static_cast<float>(x.real()));
      k.push_back(static_cast<float>(x.imag()));
    }
    return k;
  };
  for (const auto& c : ds.train) train.insert(key(c));
  EXPECT_EQ(train.size(), ds.train.size());
  for (const auto& c : ds.test) EXPECT_EQ(train.count(key(c)), 0u);
}

TEST(Dataset, DeterministicAndSeedDependent) {
  auto cfg = small_config();
  cfg.train_per_class = 6;
  cfg.test_per_class = 3;
  const auto a = build_dataset(cfg);
  const auto b = build_dataset(cfg);
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].samples, b.train[i].samples);
  cfg.seed = 6;
  const auto c = build_dataset(cfg);
  EXPECT_NE(a.train[0].samples, c.train[0].samples);
}

TEST(Dataset, TrainSplitIndependentOfTestSize) {
  auto cfg = small_config();
  cfg.train_per_class = 6;
  cfg.test_per_class = 3;
  const auto a = build_dataset(cfg);
  cfg.test_per_class = 9;
  const auto b = build_dataset(cfg);
  ASSERT_EQ(a.train.size(), b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].samples, b.train[i].samples);
}

TEST(Dataset, WriteLoadRoundTrip) {
  const auto& ds = shared_dataset();
  const auto dir = scratch("dataset");
  write_dataset(ds, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  const auto back = load_dataset(dir / "manifest.json");
  EXPECT_EQ(back.seed, ds.seed);
  ASSERT_EQ(back.train.size(), ds.train.size());
  ASSERT_EQ(back.test.size(), ds.test.size());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    EXPECT_EQ(back.train[i].samples, ds.train[i].samples);
    EXPECT_EQ(back.train[i].radar_mask, ds.train[i].radar_mask);
    EXPECT_EQ(back.train[i].provenance, ds.train[i].provenance);
    EXPECT_EQ(back.train_entries[i].psnr_db, ds.train_entries[i].psnr_db);
  }
  EXPECT_THROW(load_dataset(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, ConfigValidation) {
  auto cfg = small_config();
  cfg.train_per_class = 0;
  EXPECT_THROW(build_dataset(cfg), InvalidArgument);
  cfg = small_config();
  cfg.psnr_min_db = 30.0;
  EXPECT_THROW(build_dataset(cfg), InvalidArgument);
  cfg = small_config();
  cfg.present_mix = {0.0, 0.0, 0.0};
  EXPECT_THROW(build_dataset(cfg), InvalidArgument);
  cfg = small_config();
  cfg.offsets_hz = {11e6};
  EXPECT_THROW(build_dataset(cfg), InvalidArgument);
  EXPECT_THROW(waveform_by_name("pc7"), InvalidArgument);
}

TEST(EstimatePsnr, TenDecibelPulse) {
  const auto chunks = pulse_chunks(50, 100, 1.0, 0.1, 1);
  EXPECT_NEAR(estimate_psnr(chunks), 10.0, 0.2);
}

TEST(EstimatePsnr, DoublingAmplitudeAddsSixDecibels) {
  const auto a = pulse_chunks(50, 100, 1.0, 0.1, 2);
  const auto b = pulse_chunks(50, 100, 2.0, 0.1, 2);
  EXPECT_NEAR(estimate_psnr(b) - estimate_psnr(a), 20.0 * std::log10(2.0), 0.1);
}

TEST(EstimatePsnr, ScaleInvariant) {
  auto a = pulse_chunks(10, 60, 1.0, 0.3, 3);
  const double base = estimate_psnr(a);
  for (auto& c : a) {
    for (auto& x : c.samples) x *= 3.7;
  }
  EXPECT_NEAR(estimate_psnr(a), base, 1e-9);
}

TEST(EstimatePsnr, NoiseFreeIsInfiniteAndEmptyMaskThrows) {
  EXPECT_EQ(estimate_psnr(pulse_chunks(3, 40, 1.0, 0.0, 4)), std::numeric_limits<double>::infinity());
  const auto none = pulse_chunks(3, 0, 1.0, 0.1, 4);
  EXPECT_THROW(estimate_psnr(none), InvalidArgument);
}

TEST(PsnrSets, TrackTargetsAndRoundTrip) {
  PsnrSweepConfig cfg;
  cfg.waveforms = {waveform_by_name("pc10"), waveform_by_name("lfm10")};
  cfg.psnr_db = {0.0, 10.0, std::numeric_limits<double>::infinity()};
  cfg.chunks_per_set = 20;
  cfg.seed = 3;
  const auto sets = build_psnr_sets(cfg);
  ASSERT_EQ(sets.size(), 6u);
  EXPECT_EQ(sets[0].waveform, "pc10");
  EXPECT_EQ(sets[3].waveform, "lfm10");
  for (const auto& s : sets) {
    ASSERT_EQ(s.chunks.size(), 20u);
    for (const auto& c : s.chunks) {
      EXPECT_EQ(c.label, Label::RadarPresent);
      EXPECT_GE(c.radar_sample_count(), 8u);
    }
    if (std::isinf(s.target_psnr_db)) {
      EXPECT_EQ(s.measured_psnr_db, std::numeric_limits<double>::infinity());
    } else {
      EXPECT_NEAR(s.measured_psnr_db, s.target_psnr_db, 2.0);
    }
  }
  const auto dir = scratch("psnr");
  write_psnr_sets(sets, dir);
  const auto back = load_psnr_sets(dir / "psnr_sets.json");
  ASSERT_EQ(back.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(back[i].waveform, sets[i].waveform);
    EXPECT_EQ(back[i].target_psnr_db, sets[i].target_psnr_db);
    EXPECT_EQ(back[i].measured_psnr_db, sets[i].measured_psnr_db);
    for (std::size_t k = 0; k < sets[i].chunks.size(); ++k) EXPECT_EQ(back[i].chunks[k].samples, sets[i].chunks[k].samples);
  }
  std::filesystem::remove_all(dir);

  cfg.psnr_db = {std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(build_psnr_sets(cfg), InvalidArgument);
}

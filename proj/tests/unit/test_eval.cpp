#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "radarmon/dataset.hpp"
#include "radarmon/error.hpp"
#include "radarmon/eval.hpp"
#include "radarmon/nn/model.hpp"

using namespace radarmon;
using nn::ModelVariant;

namespace {

const nn::Architecture kTiny{{2, 2, 2, 2, 2}, 4};

// Ignores its input: all weights zero, output bias fixes the decision.
nn::CnnModel constant_model(ModelVariant v, double logit0) {
  auto m = nn::build_model(v, kTiny, 1);
  for (auto& p : m.params()) p.fill(0.0);
  m.params().back()[0] = logit0;
  return m;
}

IqChunk chunk_with_label(Label l, std::uint64_t seed) {
  std::vector<bool> mask(kChunkLen, false);
  if (l == Label::RadarPresent) mask[100] = true;
  return make_chunk(oracle::random_samples(kChunkLen, seed), mask);
}

std::vector<IqChunk> balanced(std::size_t per_class) {
  std::vector<IqChunk> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.push_back(chunk_with_label(Label::RadarPresent, 2 * i));
    out.push_back(chunk_with_label(Label::RadarAbsent, 2 * i + 1));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("radarmon_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Evaluate, ConstantPresentModel) {
  const auto m = constant_model(ModelVariant::S, 50.0);
  const auto chunks = balanced(10);
  const auto r = evaluate(m, chunks);
  EXPECT_EQ(r.model, "S");
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.confusion[0][0], 10u);
  EXPECT_EQ(r.confusion[1][0], 10u);
  EXPECT_EQ(r.confusion[0][1] + r.confusion[1][1], 0u);

  std::vector<IqChunk> only_present;
  for (const auto& c : chunks) {
    if (c.label == Label::RadarPresent) only_present.push_back(c);
  }
  EXPECT_DOUBLE_EQ(evaluate(m, only_present).accuracy, 1.0);
}

TEST(Evaluate, ConfusionSumsAndThreshold) {
  const auto chunks = balanced(50);
  const auto p = oracle::random_values(chunks.size(), 3, 0.0, 1.0);
  for (double thr : {0.0, 0.3, 0.5, 0.9, 1.1}) {
    const auto r = score(p, chunks, thr, "x");
    EXPECT_EQ(r.confusion[0][0] + r.confusion[0][1], 50u);
    EXPECT_EQ(r.confusion[1][0] + r.confusion[1][1], 50u);
    EXPECT_DOUBLE_EQ(r.accuracy, (r.confusion[0][0] + r.confusion[1][1]) / 100.0);
    std::size_t above = 0;
    for (double v : p) above += v >= thr;
    EXPECT_EQ(r.confusion[0][0] + r.confusion[1][0], above);
  }
  EXPECT_EQ(score(p, chunks, 0.0).confusion[0][0], 50u);
  EXPECT_THROW(score(std::vector<double>(3), chunks), InvalidArgument);
  EXPECT_THROW(score({}, std::span<const IqChunk>{}), InvalidArgument);
}

TEST(Evaluate, DoesNotMutateModel) {
  const auto m = nn::build_model(ModelVariant::AP, kTiny, 4);
  const auto copy = m;
  evaluate(m, balanced(3));
  EXPECT_EQ(m, copy);
}

TEST(Evaluate, CustomModelNeedsRepresentation) {
  nn::CnnModel m({1, 1, 1}, {nn::Dense{2}, nn::Softmax{}});
  EXPECT_THROW(evaluate(m, balanced(1)), InvalidArgument);
  const RepresentFn mean_power = [](const IqChunk& c) {
    double p = 0.0;
    for (const auto& x : c.samples) p += std::norm(x);
    return std::vector<double>{p / static_cast<double>(c.size())};
  };
  const auto r = evaluate(m, balanced(2), mean_power, 0.5, "power");
  EXPECT_EQ(r.model, "power");
  EXPECT_EQ(r.p_radar.size(), 4u);
}

TEST(PdCurve, PdIsFractionDetectedAndSorted) {
  const auto m = constant_model(ModelVariant::A, -50.0);
  std::vector<PsnrSet> sets;
  for (double psnr : {9.0, -3.0, 3.0}) {
    PsnrSet s;
    s.waveform = "pc10";
    s.target_psnr_db = psnr;
    s.measured_psnr_db = psnr + 0.25;
    for (std::uint64_t i = 0; i < 4; ++i) s.chunks.push_back(chunk_with_label(Label::RadarPresent, i));
    sets.push_back(std::move(s));
  }
  const auto c = pd_curve(m, sets);
  EXPECT_EQ(c.model, "A");
  EXPECT_EQ(c.waveform, "pc10");
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_DOUBLE_EQ(c.points[0].psnr_db, -2.75);
  EXPECT_DOUBLE_EQ(c.points[2].psnr_db, 9.25);
  for (const auto& p : c.points) {
    EXPECT_EQ(p.pd, 0.0);
    EXPECT_EQ(p.n, 4u);
  }
  EXPECT_EQ(pd_curve(constant_model(ModelVariant::A, 50.0), sets).points[1].pd, 1.0);

  sets[1].waveform = "lfm10";
  EXPECT_THROW(pd_curve(m, sets), InvalidArgument);
  const auto curves = pd_curves(m, sets);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].waveform, "pc10");
  EXPECT_EQ(curves[0].points.size(), 2u);
  EXPECT_EQ(curves[1].waveform, "lfm10");
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{2, 4, 8, 16, 32}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  EXPECT_EQ(spearman(x, std::vector<double>{1, 1, 1, 1, 1}), 0.0);
  // Average ranks (1.5, 1.5, 3, 4) against (1, 2, 3, 4): 4.5 / sqrt(5 * 4.5).
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{0.1, 0.1, 0.5, 0.9}),
              4.5 / std::sqrt(22.5), 1e-15);
  EXPECT_THROW(spearman(x, std::vector<double>{1.0}), InvalidArgument);
}

TEST(EmitCurves, HeaderOnlyFilesForEmptyInputs) {
  const auto dir = scratch("emit_empty");
  emit_curves({}, {}, dir);
  EXPECT_EQ(slurp(dir / "comparison.csv"), "waveform,psnr_db\n");
  EXPECT_EQ(slurp(dir / "accuracy.csv"), "model,accuracy,tp,fn,fp,tn,threshold\n");
  std::filesystem::remove_all(dir);
}

TEST(EmitCurves, OneFilePerCurvePlusSummariesAndStableBytes) {
  std::vector<PdCurve> curves;
  for (const char* model : {"S", "AP"}) {
    for (const char* w : {"pc2", "pc10", "lfm10", "pm10"}) {
      PdCurve c{model, w, {}};
      for (int k = 0; k < 3; ++k) c.points.push_back({-6.0 + 3.0 * k, 0.1 * k + (model[0] == 'S' ? 0.0 : 0.05), 200});
      curves.push_back(c);
    }
  }
  const auto chunks = balanced(2);
  const std::vector<double> p{0.9, 0.2, 0.4, 0.1};
  const std::vector<EvalReport> reports{score(p, chunks, 0.5, "S")};

  const auto dir = scratch("emit");
  emit_curves(reports, curves, dir);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  EXPECT_EQ(files, 10u);
  EXPECT_EQ(slurp(dir / "pd_AP_pm10.csv"),
            "psnr_db,pd,n\n-6.000000,0.050000,200\n-3.000000,0.150000,200\n0.000000,0.250000,200\n");
  const auto cmp = slurp(dir / "comparison.csv");
  EXPECT_EQ(cmp.substr(0, cmp.find('\n')), "waveform,psnr_db,pd_S,pd_AP");
  EXPECT_NE(cmp.find("pc2,-3.000000,0.100000,0.150000\n"), std::string::npos);
  EXPECT_EQ(slurp(dir / "accuracy.csv"),
            "model,accuracy,tp,fn,fp,tn,threshold\nS,0.750000,1,1,0,2,0.500000\n");

  const auto first = slurp(dir / "comparison.csv");
  emit_curves(reports, curves, dir);
  EXPECT_EQ(slurp(dir / "comparison.csv"), first);
  std::filesystem::remove_all(dir);
}

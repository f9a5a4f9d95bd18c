#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "radarmon/dataset.hpp"
#include "radarmon/iq.hpp"
#include "radarmon/nn/model.hpp"

namespace radarmon {

/// Maps a chunk to the flat model input.
using RepresentFn = std::function<std::vector<double>(const IqChunk&)>;

/// Representation of the model's own variant. Throws for custom models.
RepresentFn default_represent(const nn::CnnModel& model);

struct EvalReport {
  std::string model;
  double accuracy = 0.0;
  /// confusion[true label][predicted label]
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  /// P(radar present | chunk) per chunk, in input order.
  std::vector<double> p_radar;
  double threshold = 0.5;
};

/// Class 0 is predicted when P(radar present) >= threshold; 0.5 is argmax.
EvalReport evaluate(const nn::CnnModel& model, std::span<const IqChunk> chunks, double threshold = 0.5);
EvalReport evaluate(const nn::CnnModel& model, std::span<const IqChunk> chunks, const RepresentFn& represent,
                    double threshold = 0.5, std::string model_tag = {});

/// Report assembly from precomputed probabilities.
EvalReport score(std::span<const double> p_radar, std::span<const IqChunk> chunks, double threshold = 0.5,
                 std::string model_tag = {});

struct PdPoint {
  double psnr_db = 0.0;
  double pd = 0.0;
  std::size_t n = 0;
};

struct PdCurve {
  std::string model;
  std::string waveform;
  std::vector<PdPoint> points;  // sorted by psnr_db
};

/// One point per set at its measured PSNR; pd is the fraction of chunks
/// predicted as class 0. All sets must share a waveform.
PdCurve pd_curve(const nn::CnnModel& model, std::span<const PsnrSet> sets, double threshold = 0.5);
PdCurve pd_curve(const nn::CnnModel& model, std::span<const PsnrSet> sets, const RepresentFn& represent,
                 double threshold = 0.5, std::string model_tag = {});

/// One curve per waveform, in first-appearance order.
std::vector<PdCurve> pd_curves(const nn::CnnModel& model, std::span<const PsnrSet> sets, double threshold = 0.5);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Writes pd_<model>_<waveform>.csv per curve (psnr_db,pd,n), a
/// comparison.csv pairing models per (waveform, psnr_db), and accuracy.csv
/// when reports are given. Values use 6 decimals.
void emit_curves(std::span<const EvalReport> reports, std::span<const PdCurve> curves,
                 const std::filesystem::path& out_dir);

}  // namespace radarmon

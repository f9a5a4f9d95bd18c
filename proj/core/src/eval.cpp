#include "radarmon/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "radarmon/error.hpp"
#include "radarmon/represent.hpp"

namespace radarmon {

namespace {

std::string model_tag(const nn::CnnModel& model) {
  return model.variant() ? std::string(nn::to_string(*model.variant())) : std::string("custom");
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::vector<double> probabilities(const nn::CnnModel& model, std::span<const IqChunk> chunks,
                                  const RepresentFn& represent) {
  std::vector<double> p(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) p[i] = nn::forward(model, represent(chunks[i]))[0];
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

}  // namespace

RepresentFn default_represent(const nn::CnnModel& model) {
  if (!model.variant()) throw InvalidArgument("custom models need an explicit representation function");
  const auto r = nn::representation_for(*model.variant());
  return [r](const IqChunk& c) { return represent(r, c).data; };
}

EvalReport score(std::span<const double> p_radar, std::span<const IqChunk> chunks, double threshold,
                 std::string tag) {
  if (p_radar.size() != chunks.size()) throw InvalidArgument("one probability per chunk required");
  if (chunks.empty()) throw InvalidArgument("cannot evaluate an empty dataset");
  EvalReport r;
  r.model = std::move(tag);
  r.threshold = threshold;
  r.p_radar.assign(p_radar.begin(), p_radar.end());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto truth = static_cast<std::size_t>(chunks[i].label);
    const std::size_t pred = p_radar[i] >= threshold ? 0 : 1;
    ++r.confusion[truth][pred];
  }
  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / static_cast<double>(chunks.size());
  return r;
}

EvalReport evaluate(const nn::CnnModel& model, std::span<const IqChunk> chunks, const RepresentFn& represent,
                    double threshold, std::string tag) {
  if (chunks.empty()) throw InvalidArgument("cannot evaluate an empty dataset");
  if (tag.empty()) tag = model_tag(model);
  const auto p = probabilities(model, chunks, represent);
  return score(p, chunks, threshold, std::move(tag));
}

EvalReport evaluate(const nn::CnnModel& model, std::span<const IqChunk> chunks, double threshold) {
  return evaluate(model, chunks, default_represent(model), threshold);
}

PdCurve pd_curve(const nn::CnnModel& model, std::span<const PsnrSet> sets, const RepresentFn& represent,
                 double threshold, std::string tag) {
  PdCurve curve;
  curve.model = tag.empty() ? model_tag(model) : std::move(tag);
  for (const auto& set : sets) {
    if (curve.waveform.empty()) curve.waveform = set.waveform;
    if (set.waveform != curve.waveform) throw InvalidArgument("a Pd curve covers a single waveform");
    if (set.chunks.empty()) throw InvalidArgument("PSNR set for '" + set.waveform + "' is empty");
    const auto p = probabilities(model, set.chunks, represent);
    const auto detected = std::count_if(p.begin(), p.end(), [&](double v) { return v >= threshold; });
    curve.points.push_back(
        {set.measured_psnr_db, static_cast<double>(detected) / static_cast<double>(p.size()), p.size()});
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const auto& a, const auto& b) { return a.psnr_db < b.psnr_db; });
  return curve;
}

PdCurve pd_curve(const nn::CnnModel& model, std::span<const PsnrSet> sets, double threshold) {
  return pd_curve(model, sets, default_represent(model), threshold);
}

std::vector<PdCurve> pd_curves(const nn::CnnModel& model, std::span<const PsnrSet> sets, double threshold) {
  std::vector<std::string> order;
  for (const auto& s : sets) {
    if (std::find(order.begin(), order.end(), s.waveform) == order.end()) order.push_back(s.waveform);
  }
  const auto represent = default_represent(model);
  std::vector<PdCurve> curves;
  for (const auto& w : order) {
    std::vector<PsnrSet> subset;
    for (const auto& s : sets) {
      if (s.waveform == w) subset.push_back(s);
    }
    curves.push_back(pd_curve(model, subset, represent, threshold));
  }
  return curves;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman needs equal-length inputs");
  if (x.size() < 2) throw InvalidArgument("spearman needs at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void emit_curves(std::span<const EvalReport> reports, std::span<const PdCurve> curves,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> models;
  std::vector<std::string> waveforms;
  for (const auto& c : curves) {
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
    if (std::find(waveforms.begin(), waveforms.end(), c.waveform) == waveforms.end()) waveforms.push_back(c.waveform);
    std::string text = "psnr_db,pd,n\n";
    for (const auto& p : c.points) text += fixed6(p.psnr_db) + "," + fixed6(p.pd) + "," + std::to_string(p.n) + "\n";
    write_text(out_dir / ("pd_" + c.model + "_" + c.waveform + ".csv"), text);
  }

  std::string cmp = "waveform,psnr_db";
  for (const auto& m : models) cmp += ",pd_" + m;
  cmp += "\n";
  for (const auto& w : waveforms) {
    std::map<double, std::map<std::string, double>> rows;
    for (const auto& c : curves) {
      if (c.waveform != w) continue;
      for (const auto& p : c.points) rows[p.psnr_db][c.model] = p.pd;
    }
    for (const auto& [psnr, by_model] : rows) {
      cmp += w + "," + fixed6(psnr);
      for (const auto& m : models) {
        cmp += ",";
        if (auto it = by_model.find(m); it != by_model.end()) cmp += fixed6(it->second);
      }
      cmp += "\n";
    }
  }
  write_text(out_dir / "comparison.csv", cmp);

  std::string acc = "model,accuracy,tp,fn,fp,tn,threshold\n";
  for (const auto& r : reports) {
    acc += r.model + "," + fixed6(r.accuracy) + "," + std::to_string(r.confusion[0][0]) + "," +
           std::to_string(r.confusion[0][1]) + "," + std::to_string(r.confusion[1][0]) + "," +
           std::to_string(r.confusion[1][1]) + "," + fixed6(r.threshold) + "\n";
  }
  write_text(out_dir / "accuracy.csv", acc);
}

}  // namespace radarmon

#include "radarmon/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radarmon/error.hpp"
#include "radarmon/rng.hpp"

namespace radarmon::nn {

namespace {

struct Trace {
  std::vector<std::vector<double>> acts;            // acts[i] = input of layer i
  std::vector<std::vector<std::uint32_t>> argmax;   // per layer, maxpool only
};

void run_forward(const CnnModel& model, std::span<const double> input, Trace& trace) {
  const auto& layers = model.layers();
  const auto& shapes = model.shapes();
  trace.acts.resize(layers.size() + 1);
  trace.argmax.resize(layers.size());
  trace.acts[0].assign(input.begin(), input.end());

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& in = trace.acts[i];
    auto& out = trace.acts[i + 1];
    out.resize(shapes[i + 1].size());
    const int pi = model.param_index(i);
    const auto& layer = layers[i];
    if (const auto* c = std::get_if<Conv>(&layer)) {
      conv_forward(*c, shapes[i], in, model.params()[pi].values(), model.params()[pi + 1].values(), out);
    } else if (std::holds_alternative<Relu>(layer)) {
      relu_forward(in, out);
    } else if (const auto* p = std::get_if<MaxPool>(&layer)) {
      trace.argmax[i].resize(out.size());
      maxpool_forward(*p, shapes[i], in, out, trace.argmax[i]);
    } else if (std::holds_alternative<Dense>(layer)) {
      dense_forward(in, model.params()[pi].values(), model.params()[pi + 1].values(), out);
    } else {
      softmax(in, out);
    }
  }
}

// Cross-entropy from logits via log-sum-exp; accurate when p[label] ~ 1.
double cross_entropy(std::span<const double> logits, int label) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - top);
  return std::log(sum) + top - logits[static_cast<std::size_t>(label)];
}

void check_input(const CnnModel& model, std::size_t size) {
  if (size != model.input_shape().size()) {
    throw ShapeError("input of " + std::to_string(size) + " values does not match model input " +
                     to_string(model.input_shape()));
  }
}

void check_label(int label) {
  if (label != 0 && label != 1) throw InvalidArgument("label must be 0 or 1");
}

}  // namespace

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::S: return "S";
    case ModelVariant::A: return "A";
    case ModelVariant::P: return "P";
    case ModelVariant::AP: return "AP";
  }
  return "?";
}

ModelVariant variant_from_string(std::string_view s) {
  for (auto v : {ModelVariant::S, ModelVariant::A, ModelVariant::P, ModelVariant::AP}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgument("unknown model variant '" + std::string(s) + "' (expected S, A, P or AP)");
}

Representation representation_for(ModelVariant v) {
  switch (v) {
    case ModelVariant::S: return Representation::Spectrogram;
    case ModelVariant::A: return Representation::Amplitude;
    case ModelVariant::P: return Representation::PhaseDiff;
    case ModelVariant::AP: return Representation::Ap;
  }
  throw InvalidArgument("unknown model variant");
}

Shape3 input_shape_for(ModelVariant v) {
  switch (v) {
    case ModelVariant::S: return {1, 64, 64};
    case ModelVariant::A:
    case ModelVariant::P: return {1, 32, 32};
    case ModelVariant::AP: return {2, 64, 64};
  }
  throw InvalidArgument("unknown model variant");
}

CnnModel::CnnModel(Shape3 input, std::vector<LayerSpec> layers, std::optional<ModelVariant> variant)
    : layers_(std::move(layers)), variant_(variant) {
  if (input.size() == 0) throw ShapeError("model input must be non-empty");
  if (layers_.size() < 2 || !std::holds_alternative<Softmax>(layers_.back())) {
    throw ShapeError("model must end with a softmax layer");
  }
  const auto* last_dense = std::get_if<Dense>(&layers_[layers_.size() - 2]);
  if (last_dense == nullptr || last_dense->out != 2) {
    throw ShapeError("softmax must be preceded by a dense layer with 2 outputs");
  }
  shapes_.push_back(input);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (std::holds_alternative<Softmax>(layers_[i]) && i + 1 != layers_.size()) {
      throw ShapeError("softmax is only supported as the final layer");
    }
    const auto pshapes = parameter_shapes(layers_[i], shapes_.back());
    param_index_.push_back(pshapes.empty() ? -1 : static_cast<int>(params_.size()));
    for (const auto& s : pshapes) params_.emplace_back(s);
    shapes_.push_back(output_shape(layers_[i], shapes_.back()));
  }
}

std::size_t CnnModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void init_he(CnnModel& model, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    const int pi = model.param_index(i);
    if (pi < 0) continue;
    auto& w = model.params()[pi];
    const std::size_t fan_in = w.size() / w.dim(0);
    std::normal_distribution<double> g(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (auto& v : w.values()) v = g(rng);
    model.params()[pi + 1].fill(0.0);
  }
}

CnnModel build_model(ModelVariant variant, const Architecture& arch, std::uint64_t seed) {
  const auto& n = arch.conv_widths;
  std::vector<LayerSpec> layers{
      Conv{n[0], 11, 11, 1, 5}, Relu{}, MaxPool{2},
      Conv{n[1], 5, 5, 1, 2},   Relu{}, MaxPool{2},
      Conv{n[2], 3, 3, 1, 1},   Relu{}, MaxPool{2},
      Conv{n[3], 3, 3, 1, 1},   Relu{},
      Conv{n[4], 3, 3, 1, 1},   Relu{}, MaxPool{2},
      Dense{arch.dense_width},  Relu{},
      Dense{2},                 Softmax{},
  };
  CnnModel model(input_shape_for(variant), std::move(layers), variant);
  init_he(model, seed);
  return model;
}

std::vector<double> forward(const CnnModel& model, std::span<const double> input) {
  check_input(model, input.size());
  thread_local Trace trace;
  run_forward(model, input, trace);
  return trace.acts.back();
}

std::vector<double> forward(const CnnModel& model, const Tensor& input) {
  if (input.rank() == 3) {
    const Shape3 s{input.dim(0), input.dim(1), input.dim(2)};
    if (!(s == model.input_shape())) {
      throw ShapeError("input shape " + to_string(s) + " does not match model input " + to_string(model.input_shape()));
    }
  }
  return forward(model, input.values());
}

Tensor forward_batch(const CnnModel& model, const Tensor& batch) {
  if (batch.rank() != 4) throw ShapeError("batch forward expects a rank-4 tensor");
  const auto n = batch.dim(0);
  const auto per = model.input_shape().size();
  check_input(model, batch.size() / std::max<std::size_t>(n, 1));
  Tensor out({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = forward(model, batch.values().subspan(i * per, per));
    out[2 * i] = p[0];
    out[2 * i + 1] = p[1];
  }
  return out;
}

std::vector<Tensor> zero_gradients(const CnnModel& model) {
  std::vector<Tensor> g;
  g.reserve(model.params().size());
  for (const auto& p : model.params()) g.emplace_back(p.shape());
  return g;
}

double accumulate_gradients(const CnnModel& model, std::span<const double> input, int label,
                            std::vector<Tensor>& grads, double scale, std::span<double> d_input) {
  check_input(model, input.size());
  check_label(label);
  thread_local Trace trace;
  run_forward(model, input, trace);

  const auto& layers = model.layers();
  const auto& shapes = model.shapes();
  const auto& probs = trace.acts.back();
  const double loss = cross_entropy(trace.acts[layers.size() - 1], label);

  // Softmax + cross-entropy: dL/dlogits = p - onehot.
  // Every backward kernel overwrites d_in in full, so the buffers are reused
  // without clearing.
  thread_local std::vector<double> delta, d_in;
  delta.assign(probs.begin(), probs.end());
  delta[static_cast<std::size_t>(label)] -= 1.0;

  for (std::size_t idx = layers.size() - 1; idx-- > 0;) {
    const bool need_input = idx > 0 || !d_input.empty();
    d_in.resize(need_input ? shapes[idx].size() : 0);
    const int pi = model.param_index(idx);
    const auto& layer = layers[idx];
    if (const auto* c = std::get_if<Conv>(&layer)) {
      conv_backward(*c, shapes[idx], trace.acts[idx], model.params()[pi].values(), delta, grads[pi].values(),
                    grads[pi + 1].values(), d_in, scale);
    } else if (std::holds_alternative<Relu>(layer)) {
      if (need_input) relu_backward(trace.acts[idx + 1], delta, d_in);
    } else if (std::holds_alternative<MaxPool>(layer)) {
      if (need_input) maxpool_backward(trace.argmax[idx], delta, d_in);
    } else if (std::holds_alternative<Dense>(layer)) {
      dense_backward(trace.acts[idx], model.params()[pi].values(), delta, grads[pi].values(),
                     grads[pi + 1].values(), d_in, scale);
    }
    delta.swap(d_in);
  }
  if (!d_input.empty()) std::copy(delta.begin(), delta.end(), d_input.begin());
  return loss;
}

Gradients backward(const CnnModel& model, const Tensor& input, int label, bool with_input_grad) {
  Gradients g;
  g.params = zero_gradients(model);
  if (with_input_grad) g.input = Tensor(input.shape());
  g.loss = accumulate_gradients(model, input.values(), label, g.params, 1.0,
                                with_input_grad ? g.input.values() : std::span<double>{});
  return g;
}

Gradients backward_batch(const CnnModel& model, const Tensor& batch, std::span<const int> labels) {
  if (batch.rank() != 4) throw ShapeError("batch backward expects a rank-4 tensor");
  const auto n = batch.dim(0);
  if (labels.size() != n) throw InvalidArgument("one label per batch example required");
  if (n == 0) throw InvalidArgument("empty batch");
  const auto per = model.input_shape().size();
  check_input(model, batch.size() / n);
  Gradients g;
  g.params = zero_gradients(model);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.loss += accumulate_gradients(model, batch.values().subspan(i * per, per), labels[i], g.params, scale);
  }
  g.loss *= scale;
  return g;
}

double loss(const CnnModel& model, const Tensor& batch, std::span<const int> labels) {
  if (batch.rank() != 4) throw ShapeError("batch loss expects a rank-4 tensor");
  const auto n = batch.dim(0);
  if (labels.size() != n || n == 0) throw InvalidArgument("one label per batch example required");
  const auto per = model.input_shape().size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    check_label(labels[i]);
    thread_local Trace trace;
    const auto x = batch.values().subspan(i * per, per);
    check_input(model, x.size());
    run_forward(model, x, trace);
    total += cross_entropy(trace.acts[model.layers().size() - 1], labels[i]);
  }
  return total / static_cast<double>(n);
}

}  // namespace radarmon::nn

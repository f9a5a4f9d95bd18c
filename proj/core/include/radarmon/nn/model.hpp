#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "radarmon/nn/layers.hpp"
#include "radarmon/nn/tensor.hpp"
#include "radarmon/represent.hpp"

namespace radarmon::nn {

/// Classifier variants by input representation: spectrogram (S),
/// amplitude (A), phase difference (P), amplitude + phase difference (AP).
enum class ModelVariant : std::uint8_t { S, A, P, AP };

std::string_view to_string(ModelVariant v);
ModelVariant variant_from_string(std::string_view s);
Representation representation_for(ModelVariant v);
Shape3 input_shape_for(ModelVariant v);

/// Widths of the shared five-conv / two-dense stack.
struct Architecture {
  std::array<std::size_t, 5> conv_widths{32, 32, 64, 64, 64};
  std::size_t dense_width = 128;
};

/// Layer stack plus parameters. The last two layers are Dense(2) and
/// Softmax; index 0 of the output is P(radar present).
class CnnModel {
 public:
  /// Validates the stack and allocates zero-valued parameters.
  CnnModel(Shape3 input, std::vector<LayerSpec> layers, std::optional<ModelVariant> variant = std::nullopt);

  const Shape3& input_shape() const { return shapes_.front(); }
  /// Input shape of layer i; shapes()[layers().size()] is the output shape.
  const std::vector<Shape3>& shapes() const { return shapes_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::optional<ModelVariant> variant() const { return variant_; }

  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }
  /// Index into params() of layer i's weight, or -1 for parameter-free layers.
  int param_index(std::size_t layer) const { return param_index_[layer]; }
  std::size_t parameter_count() const;

  friend bool operator==(const CnnModel&, const CnnModel&) = default;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<Shape3> shapes_;
  std::vector<Tensor> params_;
  std::vector<int> param_index_;
  std::optional<ModelVariant> variant_;
};

/// Five stride-1 "same" convolutions (11x11, 5x5, 3x3, 3x3, 3x3) each
/// followed by ReLU, 2x2 max-pooling after conv 1, 2, 3 and 5, then
/// Dense(dense_width) -> ReLU -> Dense(2) -> Softmax. Weights are He-normal
/// from `seed`, biases zero.
CnnModel build_model(ModelVariant variant, const Architecture& arch = {}, std::uint64_t seed = 0);

/// Zero-mean Gaussian weights with std sqrt(2 / fan_in); zero biases.
void init_he(CnnModel& model, std::uint64_t seed);

/// Class probabilities for one example of shape input_shape() (rank 3
/// tensor or flat span).
std::vector<double> forward(const CnnModel& model, std::span<const double> input);
std::vector<double> forward(const CnnModel& model, const Tensor& input);

/// Batch forward on an N x C x H x W tensor; returns N x 2 probabilities.
Tensor forward_batch(const CnnModel& model, const Tensor& batch);

struct Gradients {
  std::vector<Tensor> params;  // same layout as CnnModel::params()
  double loss = 0.0;           // mean cross-entropy
  Tensor input;                // d loss / d input when requested, else empty
};

/// Zero-filled gradient buffers matching the model's parameters.
std::vector<Tensor> zero_gradients(const CnnModel& model);

/// Cross-entropy loss of one example; adds scale * dL/dtheta into `grads`.
/// When `d_input` is non-empty it receives dL/dinput (unscaled).
double accumulate_gradients(const CnnModel& model, std::span<const double> input, int label,
                            std::vector<Tensor>& grads, double scale, std::span<double> d_input = {});

/// Single-example gradients.
Gradients backward(const CnnModel& model, const Tensor& input, int label, bool with_input_grad = false);

/// Mean gradients over an N x C x H x W batch, examples summed in index order.
Gradients backward_batch(const CnnModel& model, const Tensor& batch, std::span<const int> labels);

/// Mean cross-entropy over a batch without gradients.
double loss(const CnnModel& model, const Tensor& batch, std::span<const int> labels);

}  // namespace radarmon::nn

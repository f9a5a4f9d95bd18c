#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace radarmon::nn {

struct Conv {
  std::size_t out_channels = 1;
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride = 1;
  std::size_t pad = 0;
  friend bool operator==(const Conv&, const Conv&) = default;
};

struct Relu {
  friend bool operator==(const Relu&, const Relu&) = default;
};

/// Non-overlapping size x size max pooling (stride = size).
struct MaxPool {
  std::size_t size = 2;
  friend bool operator==(const MaxPool&, const MaxPool&) = default;
};

/// Fully connected over the flattened input.
struct Dense {
  std::size_t out = 2;
  friend bool operator==(const Dense&, const Dense&) = default;
};

struct Softmax {
  friend bool operator==(const Softmax&, const Softmax&) = default;
};

using LayerSpec = std::variant<Conv, Relu, MaxPool, Dense, Softmax>;

struct Shape3 {
  std::size_t c = 0, h = 0, w = 0;
  std::size_t size() const { return c * h * w; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);
std::string describe(const LayerSpec& layer);

/// Output shape of `layer` applied to `in`; throws ShapeError when the
/// layer does not fit.
Shape3 output_shape(const LayerSpec& layer, const Shape3& in);

/// Parameter tensor shapes of a layer (weight then bias), empty for
/// parameter-free layers.
std::vector<std::vector<std::size_t>> parameter_shapes(const LayerSpec& layer, const Shape3& in);

// Single-example kernels. Weights are row-major: conv (out, in, kh, kw),
// dense (out, in).

void conv_forward(const Conv& spec, const Shape3& in_shape, std::span<const double> in,
                  std::span<const double> weight, std::span<const double> bias, std::span<double> out);

/// Accumulates dW and db; writes d_in when it is non-empty.
void conv_backward(const Conv& spec, const Shape3& in_shape, std::span<const double> in,
                   std::span<const double> weight, std::span<const double> d_out, std::span<double> d_weight,
                   std::span<double> d_bias, std::span<double> d_in, double scale);

void relu_forward(std::span<const double> in, std::span<double> out);
void relu_backward(std::span<const double> out, std::span<const double> d_out, std::span<double> d_in);

void maxpool_forward(const MaxPool& spec, const Shape3& in_shape, std::span<const double> in,
                     std::span<double> out, std::span<std::uint32_t> argmax);
void maxpool_backward(std::span<const std::uint32_t> argmax, std::span<const double> d_out,
                      std::span<double> d_in);

void dense_forward(std::span<const double> in, std::span<const double> weight, std::span<const double> bias,
                   std::span<double> out);
void dense_backward(std::span<const double> in, std::span<const double> weight, std::span<const double> d_out,
                    std::span<double> d_weight, std::span<double> d_bias, std::span<double> d_in, double scale);

/// Numerically stable softmax.
void softmax(std::span<const double> logits, std::span<double> probs);

}  // namespace radarmon::nn

#pragma once

#include <cstdint>
#include <vector>

#include "radarmon/nn/model.hpp"
#include "radarmon/nn/tensor.hpp"

namespace radarmon::nn {

/// Momentum SGD with L2 weight decay and a step learning-rate schedule.
/// Defaults are the reference training recipe; `iterations` and
/// `batch_size` are routinely overridden for desk-scale runs.
struct SgdConfig {
  double base_lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.001;
  std::uint64_t lr_drop_every = 5000;
  double lr_drop_factor = 10.0;
  std::size_t batch_size = 50;
  std::uint64_t iterations = 25000;

  void validate() const;
};

struct OptimizerState {
  SgdConfig config;
  std::vector<Tensor> velocity;
  std::uint64_t iteration = 0;

  /// Learning rate used by the next step: base_lr / factor^floor(iteration / drop_every).
  double learning_rate() const;
};

OptimizerState make_optimizer(const CnnModel& model, const SgdConfig& config);

/// v <- momentum * v - lr * (g + weight_decay * theta); theta <- theta + v;
/// then iteration += 1.
void sgd_step(CnnModel& model, const std::vector<Tensor>& grads, OptimizerState& state);

}  // namespace radarmon::nn

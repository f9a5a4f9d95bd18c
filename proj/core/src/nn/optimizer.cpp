#include "radarmon/nn/optimizer.hpp"

#include <cmath>

#include "radarmon/error.hpp"

namespace radarmon::nn {

void SgdConfig::validate() const {
  if (base_lr < 0.0 || momentum < 0.0 || weight_decay < 0.0) {
    throw InvalidArgument("optimizer hyperparameters must be non-negative");
  }
  if (lr_drop_every == 0) throw InvalidArgument("lr_drop_every must be positive");
  if (!(lr_drop_factor > 0.0)) throw InvalidArgument("lr_drop_factor must be positive");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
}

double OptimizerState::learning_rate() const {
  const auto drops = static_cast<double>(iteration / config.lr_drop_every);
  return config.base_lr / std::pow(config.lr_drop_factor, drops);
}

OptimizerState make_optimizer(const CnnModel& model, const SgdConfig& config) {
  config.validate();
  OptimizerState s;
  s.config = config;
  s.velocity = zero_gradients(model);
  return s;
}

void sgd_step(CnnModel& model, const std::vector<Tensor>& grads, OptimizerState& state) {
  auto& params = model.params();
  if (grads.size() != params.size() || state.velocity.size() != params.size()) {
    throw ShapeError("gradient/velocity layout does not match the model");
  }
  const double lr = state.learning_rate();
  const double mu = state.config.momentum;
  const double wd = state.config.weight_decay;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& theta = params[t];
    auto& v = state.velocity[t];
    const auto& g = grads[t];
    if (g.shape() != theta.shape() || v.shape() != theta.shape()) {
      throw ShapeError("gradient shape mismatch for parameter " + std::to_string(t));
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = mu * v[i] - lr * (g[i] + wd * theta[i]);
      theta[i] += v[i];
    }
  }
  ++state.iteration;
}

}  // namespace radarmon::nn

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "radarmon/iq.hpp"
#include "radarmon/nn/model.hpp"
#include "radarmon/nn/optimizer.hpp"

namespace radarmon::nn {

/// Called after every iteration with (iteration index, batch loss, lr).
using ProgressFn = std::function<void(std::uint64_t, double, double)>;

struct TrainOptions {
  SgdConfig sgd;
  Architecture arch;
  std::uint64_t seed = 0;
  ProgressFn on_iteration;
};

struct TrainResult {
  CnnModel model;
  std::vector<double> loss_trace;  // mean batch loss per iteration
};

/// Supplies example i as a flat input of the model's input size.
using InputFn = std::function<void(std::size_t, std::span<double>)>;

/// Mini-batch SGD over `count` examples. Batches are drawn from a seeded
/// permutation that is reshuffled each time it is exhausted.
TrainResult train_model(CnnModel model, std::size_t count, const InputFn& input, std::span<const int> labels,
                        const TrainOptions& options);

/// Builds the variant (He init from the seed), computes its representation
/// of each chunk on the fly, and trains on the chunk labels.
TrainResult train(ModelVariant variant, std::span<const IqChunk> chunks, const TrainOptions& options);

}  // namespace radarmon::nn

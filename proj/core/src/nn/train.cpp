#include "radarmon/nn/train.hpp"

#include <algorithm>
#include <numeric>

#include "radarmon/error.hpp"
#include "radarmon/rng.hpp"

namespace radarmon::nn {

namespace {
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
}  // namespace

TrainResult train_model(CnnModel model, std::size_t count, const InputFn& input, std::span<const int> labels,
                        const TrainOptions& options) {
  if (count == 0) throw InvalidArgument("training set is empty");
  if (labels.size() != count) throw InvalidArgument("one label per training example required");
  auto opt = make_optimizer(model, options.sgd);

  TrainResult result{std::move(model), {}};
  result.loss_trace.reserve(options.sgd.iterations);

  Rng rng(derive_seed(options.seed, kShuffleStream));
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = count;  // forces a shuffle before the first batch

  const auto per = result.model.input_shape().size();
  const auto batch = options.sgd.batch_size;
  std::vector<double> x(per);
  auto grads = zero_gradients(result.model);
  const double scale = 1.0 / static_cast<double>(batch);

  for (std::uint64_t it = 0; it < options.sgd.iterations; ++it) {
    for (auto& g : grads) g.fill(0.0);
    double batch_loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == count) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const auto idx = order[cursor++];
      input(idx, x);
      batch_loss += accumulate_gradients(result.model, x, labels[idx], grads, scale);
    }
    batch_loss *= scale;
    const double lr = opt.learning_rate();
    sgd_step(result.model, grads, opt);
    result.loss_trace.push_back(batch_loss);
    if (options.on_iteration) options.on_iteration(it, batch_loss, lr);
  }
  return result;
}

TrainResult train(ModelVariant variant, std::span<const IqChunk> chunks, const TrainOptions& options) {
  if (chunks.empty()) throw InvalidArgument("training set is empty");
  auto model = build_model(variant, options.arch, derive_seed(options.seed, kInitStream));
  const auto repr = representation_for(variant);
  std::vector<int> labels(chunks.size());
  std::transform(chunks.begin(), chunks.end(), labels.begin(),
                 [](const IqChunk& c) { return static_cast<int>(c.label); });
  const InputFn input = [&](std::size_t i, std::span<double> out) {
    const auto img = represent(repr, chunks[i]);
    std::copy(img.data.begin(), img.data.end(), out.begin());
  };
  return train_model(std::move(model), chunks.size(), input, labels, options);
}

}  // namespace radarmon::nn

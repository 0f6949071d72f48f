#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "neckmcl/error.hpp"
#include "neckmcl/nn/adam.hpp"
#include "neckmcl/nn/tensor.hpp"
#include "neckmcl/rng.hpp"

namespace neckmcl::nn {

struct Schedule {
  std::size_t epochs = 20;
  double learning_rate = 1e-3;
  std::size_t lr_drop_epoch = 10;  ///< 0-based epoch from which the rate is dropped
  double lr_drop_factor = 0.1;
  std::size_t batch_size = 64;
  double weight_decay = 0.0;
};

struct Batch {
  Tensor input;
  Tensor target;
  Tensor weight;  ///< empty: unweighted
  std::vector<std::size_t> index;  ///< example indices, for losses that need the raw examples
};

/// Mini-batch Adam over `count` examples, reshuffled each epoch with `rng`
/// (Fisher-Yates on the generator's own integer draws). A trailing batch of a
/// single example is skipped because batch statistics are undefined for it.
/// `make_batch(indices)` assembles one batch; `loss_hook(prediction, batch)`
/// may replace the plain MSE (it returns a LossResult). Returns the mean loss
/// per epoch.
template <class Net, class MakeBatch, class LossFn>
std::vector<double> fit(Net& net, std::size_t count, const Schedule& schedule, Rng& rng,
                        MakeBatch&& make_batch, LossFn&& loss_fn) {
  if (count == 0) throw Error(ErrorCode::InvalidInput, "training set is empty");
  if (schedule.batch_size == 0) throw Error(ErrorCode::InvalidInput, "batch size must be positive");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  AdamState adam;
  std::vector<double> history;
  history.reserve(schedule.epochs);
  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    const double lr = epoch >= schedule.lr_drop_epoch ? schedule.learning_rate * schedule.lr_drop_factor
                                                      : schedule.learning_rate;
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double total = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < count; start += schedule.batch_size) {
      const std::size_t stop = std::min(count, start + schedule.batch_size);
      if (stop - start < 2 && count > 1) continue;
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Batch batch = make_batch(idx);
      net.zero_grad();
      const Tensor prediction = net.forward(batch.input, Mode::Train);
      const LossResult loss = loss_fn(prediction, batch);
      net.backward(loss.grad);
      auto params = net.params();
      adam_step(adam, params, lr, schedule.weight_decay);
      total += loss.loss * static_cast<double>(idx.size());
      seen += idx.size();
    }
    history.push_back(seen > 0 ? total / static_cast<double>(seen) : 0.0);
  }
  return history;
}

}  // namespace neckmcl::nn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace neckmcl::nn {

/// Dense (batch, channel, time) tensor of doubles, row-major with time
/// fastest. Fully connected inputs use time = 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t batch, std::size_t channels, std::size_t time, double fill = 0.0)
      : batch_(batch), channels_(channels), time_(time), data_(batch * channels * time, fill) {}

  std::size_t batch() const { return batch_; }
  std::size_t channels() const { return channels_; }
  std::size_t time() const { return time_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t b, std::size_t c, std::size_t t) {
    return data_[(b * channels_ + c) * time_ + t];
  }
  double at(std::size_t b, std::size_t c, std::size_t t) const {
    return data_[(b * channels_ + c) * time_ + t];
  }

  /// Contiguous time series for (b, c).
  std::span<double> row(std::size_t b, std::size_t c) {
    return {data_.data() + (b * channels_ + c) * time_, time_};
  }
  std::span<const double> row(std::size_t b, std::size_t c) const {
    return {data_.data() + (b * channels_ + c) * time_, time_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Tensor& other) const {
    return batch_ == other.batch_ && channels_ == other.channels_ && time_ == other.time_;
  }
  bool all_finite() const;

 private:
  std::size_t batch_ = 0;
  std::size_t channels_ = 0;
  std::size_t time_ = 0;
  std::vector<double> data_;
};

/// Mean squared error and its gradient 2 (p - y) / N.
struct LossResult {
  double loss = 0.0;
  Tensor grad;
};
LossResult mse_loss(const Tensor& prediction, const Tensor& target);
/// Weighted variant; weights share the prediction's shape.
LossResult mse_loss(const Tensor& prediction, const Tensor& target, const Tensor& weights);

}  // namespace neckmcl::nn

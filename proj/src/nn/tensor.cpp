#include "neckmcl/nn/tensor.hpp"

#include <cmath>

#include "neckmcl/error.hpp"

namespace neckmcl::nn {

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

LossResult mse_loss(const Tensor& prediction, const Tensor& target) {
  if (!prediction.same_shape(target) || prediction.empty()) {
    throw Error(ErrorCode::Shape, "mse_loss: prediction/target shape mismatch");
  }
  LossResult out{0.0, Tensor(prediction.batch(), prediction.channels(), prediction.time())};
  const auto n = static_cast<double>(prediction.size());
  auto p = prediction.values();
  auto y = target.values();
  auto g = out.grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - y[i];
    out.loss += d * d;
    g[i] = 2.0 * d / n;
  }
  out.loss /= n;
  return out;
}

LossResult mse_loss(const Tensor& prediction, const Tensor& target, const Tensor& weights) {
  if (!prediction.same_shape(target) || !prediction.same_shape(weights) || prediction.empty()) {
    throw Error(ErrorCode::Shape, "mse_loss: prediction/target/weight shape mismatch");
  }
  LossResult out{0.0, Tensor(prediction.batch(), prediction.channels(), prediction.time())};
  const auto n = static_cast<double>(prediction.size());
  auto p = prediction.values();
  auto y = target.values();
  auto w = weights.values();
  auto g = out.grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - y[i];
    out.loss += w[i] * d * d;
    g[i] = 2.0 * w[i] * d / n;
  }
  out.loss /= n;
  return out;
}

}  // namespace neckmcl::nn

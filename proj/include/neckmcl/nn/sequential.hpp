#pragma once

#include <string>
#include <variant>
#include <vector>

#include "neckmcl/nn/layers.hpp"

namespace neckmcl::nn {

using Layer = std::variant<FullyConnected, Conv1D, BatchNorm1D, ReLU, MaxPool1D, Softplus>;

/// Short tag used in parameter names: "fc", "conv", "bn", "relu", "pool", "softplus".
std::string layer_tag(const Layer& layer);

class Sequential {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<Layer> layers) : layers_(std::move(layers)) {}

  void add(Layer layer) { layers_.push_back(std::move(layer)); }
  void init(Rng& rng);

  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);

  /// Parameters and buffers named "<index>.<tag>.<param>".
  std::vector<ParamRef> params();
  void zero_grad();

  std::size_t size() const { return layers_.size(); }
  Layer& operator[](std::size_t i) { return layers_[i]; }
  const Layer& operator[](std::size_t i) const { return layers_[i]; }

 private:
  std::vector<Layer> layers_;
};

}  // namespace neckmcl::nn

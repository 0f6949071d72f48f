#include "neckmcl/nn/sequential.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace neckmcl::nn {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

std::string layer_tag(const Layer& layer) {
  return std::visit(Overloaded{[](const FullyConnected&) { return std::string("fc"); },
                               [](const Conv1D&) { return std::string("conv"); },
                               [](const BatchNorm1D&) { return std::string("bn"); },
                               [](const ReLU&) { return std::string("relu"); },
                               [](const MaxPool1D&) { return std::string("pool"); },
                               [](const Softplus&) { return std::string("softplus"); }},
                    layer);
}

void Sequential::init(Rng& rng) {
  for (auto& layer : layers_) std::visit([&](auto& l) { l.init(rng); }, layer);
}

Tensor Sequential::forward(const Tensor& x, Mode mode) {
  Tensor h = x;
  for (auto& layer : layers_) h = std::visit([&](auto& l) { return l.forward(h, mode); }, layer);
  return h;
}

Tensor Sequential::infer(const Tensor& x) const {
  Tensor h = x;
  for (const auto& layer : layers_) h = std::visit([&](const auto& l) { return l.infer(h); }, layer);
  return h;
}

Tensor Sequential::backward(const Tensor& dy) {
  Tensor g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = std::visit([&](auto& l) { return l.backward(g); }, *it);
  }
  return g;
}

std::vector<ParamRef> Sequential::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = fmt::format("{}.{}.", i, layer_tag(layers_[i]));
    std::visit([&](auto& l) { l.collect(out, prefix); }, layers_[i]);
  }
  return out;
}

void Sequential::zero_grad() {
  for (auto& p : params()) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

}  // namespace neckmcl::nn

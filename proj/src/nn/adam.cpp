#include "neckmcl/nn/adam.hpp"

#include <cmath>

#include "neckmcl/error.hpp"

namespace neckmcl::nn {

void adam_step(AdamState& state, std::vector<ParamRef>& params, double lr, double weight_decay) {
  std::size_t slot = 0;
  const bool fresh = state.first_moment.empty();
  for (const auto& p : params) {
    if (!p.trainable) continue;
    if (fresh) {
      state.first_moment.emplace_back(p.value.size(), 0.0);
      state.second_moment.emplace_back(p.value.size(), 0.0);
    } else if (slot >= state.first_moment.size() || state.first_moment[slot].size() != p.value.size()) {
      throw Error(ErrorCode::Shape, "adam_step: parameter layout changed between steps");
    }
    ++slot;
  }
  if (slot != state.first_moment.size()) {
    throw Error(ErrorCode::Shape, "adam_step: parameter count changed between steps");
  }

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  slot = 0;
  for (auto& p : params) {
    if (!p.trainable) continue;
    auto& m = state.first_moment[slot];
    auto& v = state.second_moment[slot];
    ++slot;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      if (p.decay && weight_decay > 0.0) p.value[i] -= lr * weight_decay * p.value[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace neckmcl::nn

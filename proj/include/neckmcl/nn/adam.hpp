#pragma once

#include <cstdint>
#include <vector>

#include "neckmcl/nn/layers.hpp"

namespace neckmcl::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates, one vector per trainable parameter in the order the
/// parameter list was first seen.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update over the trainable entries of `params`.
/// Weight decay is decoupled (p -= lr * weight_decay * p) and only applied to
/// parameters with `decay` set.
void adam_step(AdamState& state, std::vector<ParamRef>& params, double lr, double weight_decay = 0.0);

}  // namespace neckmcl::nn

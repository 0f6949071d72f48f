#include "neckmcl/nn/gradcheck.hpp"

#include <algorithm>

namespace neckmcl::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return std::abs(analytic - numeric) / std::max(scale, floor);
}

Tensor random_tensor(std::size_t batch, std::size_t channels, std::size_t time, Rng& rng) {
  Tensor t(batch, channels, time);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace neckmcl::nn

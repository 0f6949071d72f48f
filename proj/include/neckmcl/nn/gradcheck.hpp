#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "neckmcl/nn/layers.hpp"
#include "neckmcl/nn/tensor.hpp"
#include "neckmcl/rng.hpp"

namespace neckmcl::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst;  ///< parameter name or "input"
  std::size_t entries = 0;

  bool passed(double tolerance = 1e-4) const { return max_rel_error < tolerance; }
};

/// |a - n| / max(|a|, |n|); pairs where both magnitudes are below `floor`
/// are compared absolutely against the floor instead.
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Random tensor with entries in [-1, 1].
Tensor random_tensor(std::size_t batch, std::size_t channels, std::size_t time, Rng& rng);

/// Checks d<y, probe>/d(theta) for every parameter entry and every input
/// entry of `net` against central differences with step `h`. `Net` provides
/// forward(x, Mode), backward(dy), params() and zero_grad(). The forward map
/// runs in train mode, so batch statistics are part of the checked function.
/// An entry that misses at `h` is retried at h/10 and h/100 and keeps its
/// best agreement: a ReLU or max-pool switch inside +-h only spoils the
/// larger steps, while a wrong gradient disagrees at every step.
template <class Net>
GradCheckReport check_gradients(Net& net, const Tensor& x, Rng& rng, double h = 1e-4) {
  const auto probe_loss = [](const Tensor& y, const Tensor& probe) {
    double acc = 0.0;
    const auto yv = y.values();
    const auto pv = probe.values();
    for (std::size_t i = 0; i < yv.size(); ++i) acc += yv[i] * pv[i];
    return acc;
  };

  Tensor y = net.forward(x, Mode::Train);
  const Tensor probe = random_tensor(y.batch(), y.channels(), y.time(), rng);
  net.zero_grad();
  const Tensor dx = net.backward(probe);

  GradCheckReport report;
  const auto consider = [&](double e, const std::string& name) {
    if (report.entries++ == 0 || e > report.max_rel_error) {
      report.max_rel_error = e;
      report.worst = name;
    }
  };

  // Numeric derivative of the probe loss along one scalar slot.
  const auto numeric = [&](double& slot, const Tensor& input, double step) {
    const double saved = slot;
    slot = saved + step;
    const double up = probe_loss(net.forward(input, Mode::Train), probe);
    slot = saved - step;
    const double down = probe_loss(net.forward(input, Mode::Train), probe);
    slot = saved;
    return (up - down) / (2.0 * step);
  };
  const auto best_error = [&](double analytic, double& slot, const Tensor& input) {
    double e = relative_error(analytic, numeric(slot, input, h));
    double step = h;
    for (int retry = 0; retry < 2 && e > 1e-6; ++retry) {
      step /= 10.0;
      e = std::min(e, relative_error(analytic, numeric(slot, input, step)));
    }
    return e;
  };

  auto params = net.params();
  for (auto& p : params) {
    if (!p.trainable) continue;
    const std::vector<double> analytic(p.grad.begin(), p.grad.end());
    for (std::size_t i = 0; i < p.value.size(); ++i) consider(best_error(analytic[i], p.value[i], x), p.name);
  }

  Tensor xp = x;
  auto xv = xp.values();
  const auto dxv = dx.values();
  for (std::size_t i = 0; i < xv.size(); ++i) consider(best_error(dxv[i], xv[i], xp), "input");
  return report;
}

}  // namespace neckmcl::nn

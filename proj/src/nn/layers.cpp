#include "neckmcl/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "neckmcl/error.hpp"
#include "neckmcl/simd.hpp"

namespace neckmcl::nn {

namespace {

void require_cache(bool cached, const char* layer) {
  if (!cached) {
    throw Error(ErrorCode::State, fmt::format("{}: backward called without a train-mode forward", layer));
  }
}

void require_channels(const Tensor& x, std::size_t channels, const char* layer) {
  if (x.channels() != channels || x.empty()) {
    throw Error(ErrorCode::Shape, fmt::format("{}: expected {} input channels, got {} (batch {}, time {})",
                                              layer, channels, x.channels(), x.batch(), x.time()));
  }
}

void require_same(const Tensor& a, const Tensor& b, const char* layer) {
  if (!a.same_shape(b)) throw Error(ErrorCode::Shape, fmt::format("{}: gradient shape mismatch", layer));
}

void uniform_fill(std::vector<double>& v, double bound, Rng& rng) {
  for (double& x : v) x = rng.uniform(-bound, bound);
}

// Overlap of output times [lo, hi) with input index t + shift in [0, T).
struct Span {
  std::size_t lo, hi;
};
Span overlap(std::size_t time, std::ptrdiff_t shift) {
  const auto t = static_cast<std::ptrdiff_t>(time);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(t, t - shift);
  if (hi <= lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  // y > 0; log(e^y - 1) computed stably.
  return y > 30.0 ? y : std::log(std::expm1(y));
}

// ---- FullyConnected ------------------------------------------------------

FullyConnected::FullyConnected(std::size_t in, std::size_t out)
    : in_(in), out_(out), weight_(in * out, 0.0), bias_(out, 0.0),
      grad_weight_(in * out, 0.0), grad_bias_(out, 0.0) {}

void FullyConnected::init(Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(in_));
  uniform_fill(weight_, bound, rng);
  uniform_fill(bias_, bound, rng);
}

Tensor FullyConnected::infer(const Tensor& x) const {
  require_channels(x, in_, "FullyConnected");
  Tensor y(x.batch(), out_, x.time());
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      auto yr = y.row(b, o);
      std::fill(yr.begin(), yr.end(), bias_[o]);
      for (std::size_t i = 0; i < in_; ++i) simd::axpy(weight_[o * in_ + i], x.row(b, i), yr);
    }
  }
  return y;
}

Tensor FullyConnected::forward(const Tensor& x, Mode mode) {
  Tensor y = infer(x);
  cached_ = mode == Mode::Train;
  if (cached_) input_ = x;
  return y;
}

Tensor FullyConnected::backward(const Tensor& dy) {
  require_cache(cached_, "FullyConnected");
  if (dy.batch() != input_.batch() || dy.channels() != out_ || dy.time() != input_.time()) {
    throw Error(ErrorCode::Shape, "FullyConnected: gradient shape mismatch");
  }
  Tensor dx(input_.batch(), in_, input_.time());
  for (std::size_t b = 0; b < input_.batch(); ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      const auto g = dy.row(b, o);
      grad_bias_[o] += simd::sum(g);
      for (std::size_t i = 0; i < in_; ++i) {
        grad_weight_[o * in_ + i] += simd::dot(g, input_.row(b, i));
        simd::axpy(weight_[o * in_ + i], g, dx.row(b, i));
      }
    }
  }
  return dx;
}

void FullyConnected::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({prefix + "weight", {out_, in_}, weight_, grad_weight_, true, true});
  out.push_back({prefix + "bias", {out_}, bias_, grad_bias_, true, true});
}

// ---- Conv1D --------------------------------------------------------------

Conv1D::Conv1D(std::size_t in, std::size_t out, std::size_t kernel)
    : in_(in), out_(out), kernel_(kernel), weight_(in * out * kernel, 0.0), bias_(out, 0.0),
      grad_weight_(in * out * kernel, 0.0), grad_bias_(out, 0.0) {
  if (kernel % 2 == 0) throw Error(ErrorCode::InvalidInput, "Conv1D: kernel size must be odd");
}

void Conv1D::init(Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(in_ * kernel_));
  uniform_fill(weight_, bound, rng);
  uniform_fill(bias_, bound, rng);
}

Tensor Conv1D::infer(const Tensor& x) const {
  require_channels(x, in_, "Conv1D");
  const std::size_t time = x.time();
  const auto pad = static_cast<std::ptrdiff_t>(kernel_ / 2);
  Tensor y(x.batch(), out_, time);
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      auto yr = y.row(b, o);
      std::fill(yr.begin(), yr.end(), bias_[o]);
      for (std::size_t i = 0; i < in_; ++i) {
        const auto xr = x.row(b, i);
        for (std::size_t j = 0; j < kernel_; ++j) {
          const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
          const Span s = overlap(time, shift);
          if (s.hi == s.lo) continue;
          simd::axpy(w(o, i, j), xr.subspan(s.lo + shift, s.hi - s.lo), yr.subspan(s.lo, s.hi - s.lo));
        }
      }
    }
  }
  return y;
}

Tensor Conv1D::forward(const Tensor& x, Mode mode) {
  Tensor y = infer(x);
  cached_ = mode == Mode::Train;
  if (cached_) input_ = x;
  return y;
}

Tensor Conv1D::backward(const Tensor& dy) {
  require_cache(cached_, "Conv1D");
  if (dy.batch() != input_.batch() || dy.channels() != out_ || dy.time() != input_.time()) {
    throw Error(ErrorCode::Shape, "Conv1D: gradient shape mismatch");
  }
  const std::size_t time = input_.time();
  const auto pad = static_cast<std::ptrdiff_t>(kernel_ / 2);
  Tensor dx(input_.batch(), in_, time);
  for (std::size_t b = 0; b < input_.batch(); ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      const auto g = dy.row(b, o);
      grad_bias_[o] += simd::sum(g);
      for (std::size_t i = 0; i < in_; ++i) {
        const auto xr = input_.row(b, i);
        auto dxr = dx.row(b, i);
        for (std::size_t j = 0; j < kernel_; ++j) {
          const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
          const Span s = overlap(time, shift);
          if (s.hi == s.lo) continue;
          const std::size_t len = s.hi - s.lo;
          grad_weight_[(o * in_ + i) * kernel_ + j] += simd::dot(g.subspan(s.lo, len), xr.subspan(s.lo + shift, len));
          simd::axpy(w(o, i, j), g.subspan(s.lo, len), dxr.subspan(s.lo + shift, len));
        }
      }
    }
  }
  return dx;
}

void Conv1D::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({prefix + "weight", {out_, in_, kernel_}, weight_, grad_weight_, true, true});
  out.push_back({prefix + "bias", {out_}, bias_, grad_bias_, true, true});
}

// ---- BatchNorm1D ---------------------------------------------------------

BatchNorm1D::BatchNorm1D(std::size_t channels, double epsilon, double momentum)
    : channels_(channels), epsilon_(epsilon), momentum_(momentum), gain_(channels, 1.0),
      shift_(channels, 0.0), grad_gain_(channels, 0.0), grad_shift_(channels, 0.0),
      running_mean_(channels, 0.0), running_var_(channels, 1.0) {}

void BatchNorm1D::init(Rng&) {
  std::fill(gain_.begin(), gain_.end(), 1.0);
  std::fill(shift_.begin(), shift_.end(), 0.0);
  std::fill(running_mean_.begin(), running_mean_.end(), 0.0);
  std::fill(running_var_.begin(), running_var_.end(), 1.0);
}

Tensor BatchNorm1D::infer(const Tensor& x) const {
  require_channels(x, channels_, "BatchNorm1D");
  Tensor y(x.batch(), channels_, x.time());
  for (std::size_t c = 0; c < channels_; ++c) {
    const double inv = 1.0 / std::sqrt(running_var_[c] + epsilon_);
    const double a = gain_[c] * inv;
    const double k = shift_[c] - a * running_mean_[c];
    for (std::size_t b = 0; b < x.batch(); ++b) {
      const auto xr = x.row(b, c);
      auto yr = y.row(b, c);
      for (std::size_t t = 0; t < xr.size(); ++t) yr[t] = a * xr[t] + k;
    }
  }
  return y;
}

Tensor BatchNorm1D::forward(const Tensor& x, Mode mode) {
  if (mode == Mode::Eval) {
    cached_ = false;
    return infer(x);
  }
  require_channels(x, channels_, "BatchNorm1D");
  const std::size_t count = x.batch() * x.time();
  const auto n = static_cast<double>(count);
  Tensor y(x.batch(), channels_, x.time());
  normalized_ = Tensor(x.batch(), channels_, x.time());
  inv_std_.assign(channels_, 0.0);
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < x.batch(); ++b) mean += simd::sum(x.row(b, c));
    mean /= n;
    double var = 0.0;
    for (std::size_t b = 0; b < x.batch(); ++b) {
      for (double v : x.row(b, c)) var += (v - mean) * (v - mean);
    }
    var /= n;
    const double inv = 1.0 / std::sqrt(var + epsilon_);
    inv_std_[c] = inv;
    for (std::size_t b = 0; b < x.batch(); ++b) {
      const auto xr = x.row(b, c);
      auto hr = normalized_.row(b, c);
      auto yr = y.row(b, c);
      for (std::size_t t = 0; t < xr.size(); ++t) {
        hr[t] = (xr[t] - mean) * inv;
        yr[t] = gain_[c] * hr[t] + shift_[c];
      }
    }
    const double unbiased = count > 1 ? var * n / (n - 1.0) : var;
    running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean;
    running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * unbiased;
  }
  cached_ = true;
  return y;
}

Tensor BatchNorm1D::backward(const Tensor& dy) {
  require_cache(cached_, "BatchNorm1D");
  require_same(dy, normalized_, "BatchNorm1D");
  const auto n = static_cast<double>(dy.batch() * dy.time());
  Tensor dx(dy.batch(), channels_, dy.time());
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < dy.batch(); ++b) {
      sum_dy += simd::sum(dy.row(b, c));
      sum_dy_xhat += simd::dot(dy.row(b, c), normalized_.row(b, c));
    }
    grad_shift_[c] += sum_dy;
    grad_gain_[c] += sum_dy_xhat;
    const double k = gain_[c] * inv_std_[c] / n;
    for (std::size_t b = 0; b < dy.batch(); ++b) {
      const auto g = dy.row(b, c);
      const auto h = normalized_.row(b, c);
      auto d = dx.row(b, c);
      for (std::size_t t = 0; t < g.size(); ++t) d[t] = k * (n * g[t] - sum_dy - h[t] * sum_dy_xhat);
    }
  }
  return dx;
}

void BatchNorm1D::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({prefix + "gain", {channels_}, gain_, grad_gain_, true, false});
  out.push_back({prefix + "shift", {channels_}, shift_, grad_shift_, true, false});
  out.push_back({prefix + "running_mean", {channels_}, running_mean_, {}, false, false});
  out.push_back({prefix + "running_var", {channels_}, running_var_, {}, false, false});
}

// ---- ReLU ----------------------------------------------------------------

Tensor ReLU::infer(const Tensor& x) const {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor ReLU::forward(const Tensor& x, Mode mode) {
  cached_ = mode == Mode::Train;
  if (cached_) input_ = x;
  return infer(x);
}

Tensor ReLU::backward(const Tensor& dy) {
  require_cache(cached_, "ReLU");
  require_same(dy, input_, "ReLU");
  Tensor dx = dy;
  auto in = input_.values();
  auto d = dx.values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(in[i] > 0.0)) d[i] = 0.0;
  }
  return dx;
}

// ---- MaxPool1D -----------------------------------------------------------

MaxPool1D::MaxPool1D(std::size_t kernel, std::size_t stride) : kernel_(kernel), stride_(stride) {
  if (kernel == 0 || stride == 0) throw Error(ErrorCode::InvalidInput, "MaxPool1D: kernel and stride must be positive");
}

Tensor MaxPool1D::pool(const Tensor& x, std::vector<std::size_t>* argmax) const {
  if (x.time() < kernel_ || x.empty()) throw Error(ErrorCode::Shape, "MaxPool1D: input shorter than kernel");
  const std::size_t out_time = (x.time() - kernel_) / stride_ + 1;
  Tensor y(x.batch(), x.channels(), out_time);
  if (argmax) argmax->assign(y.size(), 0);
  std::size_t flat = 0;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t c = 0; c < x.channels(); ++c) {
      const auto xr = x.row(b, c);
      auto yr = y.row(b, c);
      for (std::size_t t = 0; t < out_time; ++t, ++flat) {
        std::size_t best = t * stride_;
        for (std::size_t j = 1; j < kernel_; ++j) {
          if (xr[t * stride_ + j] > xr[best]) best = t * stride_ + j;
        }
        yr[t] = xr[best];
        if (argmax) (*argmax)[flat] = best;
      }
    }
  }
  return y;
}

Tensor MaxPool1D::infer(const Tensor& x) const { return pool(x, nullptr); }

Tensor MaxPool1D::forward(const Tensor& x, Mode mode) {
  cached_ = mode == Mode::Train;
  if (!cached_) return pool(x, nullptr);
  in_time_ = x.time();
  return pool(x, &argmax_);
}

Tensor MaxPool1D::backward(const Tensor& dy) {
  require_cache(cached_, "MaxPool1D");
  if (dy.size() != argmax_.size()) throw Error(ErrorCode::Shape, "MaxPool1D: gradient shape mismatch");
  Tensor dx(dy.batch(), dy.channels(), in_time_);
  std::size_t flat = 0;
  for (std::size_t b = 0; b < dy.batch(); ++b) {
    for (std::size_t c = 0; c < dy.channels(); ++c) {
      const auto g = dy.row(b, c);
      auto d = dx.row(b, c);
      for (std::size_t t = 0; t < g.size(); ++t, ++flat) d[argmax_[flat]] += g[t];
    }
  }
  return dx;
}

// ---- Softplus ------------------------------------------------------------

Tensor Softplus::infer(const Tensor& x) const {
  Tensor y = x;
  for (double& v : y.values()) v = softplus(v);
  return y;
}

Tensor Softplus::forward(const Tensor& x, Mode mode) {
  cached_ = mode == Mode::Train;
  if (cached_) input_ = x;
  return infer(x);
}

Tensor Softplus::backward(const Tensor& dy) {
  require_cache(cached_, "Softplus");
  require_same(dy, input_, "Softplus");
  Tensor dx = dy;
  auto in = input_.values();
  auto d = dx.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= sigmoid(in[i]);
  return dx;
}

}  // namespace neckmcl::nn

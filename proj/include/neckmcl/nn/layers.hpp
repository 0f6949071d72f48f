#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "neckmcl/nn/tensor.hpp"
#include "neckmcl/rng.hpp"

namespace neckmcl::nn {

enum class Mode { Train, Eval };

/// View of one named parameter (or buffer) and its gradient.
struct ParamRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<double> value;
  std::span<double> grad;  ///< empty for buffers
  bool trainable = true;
  bool decay = true;  ///< subject to weight decay
};

// Each layer has:
//   forward(x, mode)  train mode caches what backward needs; eval mode does not
//   infer(x) const    eval-mode forward, re-entrant on shared parameters
//   backward(dy)      returns dx, accumulates parameter gradients
//   collect(out, prefix)

class FullyConnected {
 public:
  FullyConnected(std::size_t in, std::size_t out);

  void init(Rng& rng);
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  std::vector<double>& weight() { return weight_; }
  std::vector<double>& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  std::vector<double> weight_, bias_, grad_weight_, grad_bias_;
  Tensor input_;
  bool cached_ = false;
};

/// Same-length 1D convolution (zero padding k/2, odd kernel).
class Conv1D {
 public:
  Conv1D(std::size_t in, std::size_t out, std::size_t kernel = 3);

  void init(Rng& rng);
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  std::size_t kernel() const { return kernel_; }
  std::vector<double>& weight() { return weight_; }
  std::vector<double>& bias() { return bias_; }

 private:
  double w(std::size_t o, std::size_t i, std::size_t j) const {
    return weight_[(o * in_ + i) * kernel_ + j];
  }

  std::size_t in_, out_, kernel_;
  std::vector<double> weight_, bias_, grad_weight_, grad_bias_;
  Tensor input_;
  bool cached_ = false;
};

/// Normalises each channel over (batch, time). Batch statistics in train
/// mode, running statistics in eval mode.
class BatchNorm1D {
 public:
  explicit BatchNorm1D(std::size_t channels, double epsilon = 1e-5, double momentum = 0.1);

  void init(Rng& rng);
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  std::size_t channels() const { return channels_; }
  const std::vector<double>& running_mean() const { return running_mean_; }
  const std::vector<double>& running_var() const { return running_var_; }
  std::vector<double>& gain() { return gain_; }
  std::vector<double>& shift() { return shift_; }

 private:
  std::size_t channels_;
  double epsilon_, momentum_;
  std::vector<double> gain_, shift_, grad_gain_, grad_shift_;
  std::vector<double> running_mean_, running_var_;
  Tensor normalized_;
  std::vector<double> inv_std_;
  bool cached_ = false;
};

class ReLU {
 public:
  void init(Rng&) {}
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>&, const std::string&) {}

 private:
  Tensor input_;
  bool cached_ = false;
};

/// Max pooling over time; ties go to the earlier sample.
class MaxPool1D {
 public:
  explicit MaxPool1D(std::size_t kernel = 2, std::size_t stride = 2);

  void init(Rng&) {}
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>&, const std::string&) {}

  std::size_t kernel() const { return kernel_; }
  std::size_t stride() const { return stride_; }

 private:
  Tensor pool(const Tensor& x, std::vector<std::size_t>* argmax) const;

  std::size_t kernel_, stride_;
  std::size_t in_time_ = 0;
  std::vector<std::size_t> argmax_;
  bool cached_ = false;
};

/// log(1 + e^x), used as a positivity head.
class Softplus {
 public:
  void init(Rng&) {}
  Tensor forward(const Tensor& x, Mode mode);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>&, const std::string&) {}

 private:
  Tensor input_;
  bool cached_ = false;
};

double softplus(double x);
double sigmoid(double x);
double softplus_inverse(double y);

}  // namespace neckmcl::nn

#include "neckmcl/mclnet.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "neckmcl/error.hpp"
#include "neckmcl/nn/trainer.hpp"

namespace neckmcl::mcl {

using nn::Mode;
using nn::Tensor;

namespace {

constexpr std::size_t kHidden = 20;

nn::Sequential build_passive() {
  nn::Sequential s;
  s.add(nn::Conv1D(2, kHidden));
  s.add(nn::BatchNorm1D(kHidden));
  s.add(nn::ReLU{});
  s.add(nn::Conv1D(kHidden, kHidden));
  s.add(nn::BatchNorm1D(kHidden));
  s.add(nn::ReLU{});
  s.add(nn::Conv1D(kHidden, 2));
  s.add(nn::BatchNorm1D(2));
  return s;
}

nn::Sequential build_torque_to_mcl() {
  nn::Sequential s;
  s.add(nn::Conv1D(2, kHidden));
  s.add(nn::BatchNorm1D(kHidden));
  s.add(nn::ReLU{});
  s.add(nn::Conv1D(kHidden, kHidden));
  s.add(nn::BatchNorm1D(kHidden));
  s.add(nn::ReLU{});
  s.add(nn::MaxPool1D(2, 2));
  s.add(nn::Conv1D(kHidden, kHidden));
  s.add(nn::BatchNorm1D(kHidden));
  s.add(nn::ReLU{});
  s.add(nn::FullyConnected(kHidden, 1));
  s.add(nn::Softplus{});
  return s;
}

void require_input(const Tensor& x) {
  if (x.channels() != kInputChannels || x.time() != kin::kWindowLength) {
    throw Error(ErrorCode::Shape,
                fmt::format("MclNet: expected (B, 4, 8) input, got (B, {}, {})", x.channels(), x.time()));
  }
  if (!x.all_finite()) throw Error(ErrorCode::InvalidInput, "MclNet: non-finite input");
}

Tensor channels_of(const Tensor& x, std::size_t first) {
  Tensor out(x.batch(), 2, x.time());
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto src = x.row(b, first + c);
      std::copy(src.begin(), src.end(), out.row(b, c).begin());
    }
  }
  return out;
}

Tensor active_torque(const Tensor& accel, const Tensor& passive, double inertia) {
  Tensor ta(accel.batch(), 2, accel.time());
  const auto a = accel.values();
  const auto p = passive.values();
  auto t = ta.values();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = inertia * a[i] - p[i];
  return ta;
}

}  // namespace

MclNet::MclNet() : passive_(build_passive()), torque_(build_torque_to_mcl()) {}

void MclNet::init(Rng& rng) {
  passive_.init(rng);
  torque_.init(rng);
  log_inertia_ = 0.0;
  trained = false;
}

double MclNet::inertia() const { return std::exp(log_inertia_); }

Tensor MclNet::forward(const Tensor& x, Mode mode) {
  require_input(x);
  Tensor accel = channels_of(x, 2);
  const Tensor tp = passive_.forward(channels_of(x, 0), mode);
  Tensor y = torque_.forward(active_torque(accel, tp, inertia()), mode);
  cached_ = mode == Mode::Train;
  if (cached_) accel_ = std::move(accel);
  return y;
}

Tensor MclNet::infer(const Tensor& x) const { return trace(x).mcl; }

MclNet::Trace MclNet::trace(const Tensor& x) const {
  require_input(x);
  Trace t;
  t.passive_torque = passive_.infer(channels_of(x, 0));
  t.active_torque = active_torque(channels_of(x, 2), t.passive_torque, inertia());
  t.mcl = torque_.infer(t.active_torque);
  return t;
}

Tensor MclNet::backward(const Tensor& dy) {
  if (!cached_) throw Error(ErrorCode::State, "MclNet: backward without a train-mode forward");
  const Tensor dta = torque_.backward(dy);
  const double inertia = this->inertia();
  const auto g = dta.values();
  const auto a = accel_.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * a[i];
  grad_log_inertia_ += inertia * acc;

  Tensor dtp(dta.batch(), 2, dta.time());
  auto dtpv = dtp.values();
  for (std::size_t i = 0; i < g.size(); ++i) dtpv[i] = -g[i];
  const Tensor dpose = passive_.backward(dtp);

  Tensor dx(dta.batch(), kInputChannels, dta.time());
  for (std::size_t b = 0; b < dx.batch(); ++b) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto dp = dpose.row(b, c);
      std::copy(dp.begin(), dp.end(), dx.row(b, c).begin());
      const auto dt = dta.row(b, c);
      auto out = dx.row(b, 2 + c);
      for (std::size_t t = 0; t < dt.size(); ++t) out[t] = inertia * dt[t];
    }
  }
  return dx;
}

std::vector<nn::ParamRef> MclNet::params() {
  std::vector<nn::ParamRef> out;
  for (auto& p : passive_.params()) {
    p.name = "passive_torque_net." + p.name;
    out.push_back(std::move(p));
  }
  for (auto& p : torque_.params()) {
    p.name = "torque_to_mcl_net." + p.name;
    out.push_back(std::move(p));
  }
  out.push_back({"log_inertia", {1}, {&log_inertia_, 1}, {&grad_log_inertia_, 1}, true, false});
  return out;
}

void MclNet::zero_grad() {
  passive_.zero_grad();
  torque_.zero_grad();
  grad_log_inertia_ = 0.0;
}

Tensor make_input(std::span<const kin::MotionWindow> windows, const InputStats& stats) {
  Tensor x(windows.size(), kInputChannels, kin::kWindowLength);
  for (std::size_t b = 0; b < windows.size(); ++b) {
    const auto& w = windows[b];
    for (std::size_t t = 0; t < kin::kWindowLength; ++t) {
      x.at(b, 0, t) = (w.pose[t].pitch - stats.pose_mean[0]) / stats.pose_std[0];
      x.at(b, 1, t) = (w.pose[t].yaw - stats.pose_mean[1]) / stats.pose_std[1];
      x.at(b, 2, t) = w.acceleration[t].pitch / stats.accel_std[0];
      x.at(b, 3, t) = w.acceleration[t].yaw / stats.accel_std[1];
    }
  }
  return x;
}

namespace {

void require_trained(const MclNet& net) {
  if (!net.trained) throw Error(ErrorCode::State, "MclNet: parameters are untrained");
}

}  // namespace

std::array<double, 4> forward(const MclNet& net, const kin::MotionWindow& window) {
  require_trained(net);
  const Tensor y = net.infer(make_input({&window, 1}, net.stats));
  return {y.at(0, 0, 0), y.at(0, 0, 1), y.at(0, 0, 2), y.at(0, 0, 3)};
}

Estimate estimate_sequence(const MclNet& net, const kin::TimedTrajectory& traj, std::size_t stride) {
  require_trained(net);
  if (std::abs(traj.sample_rate - kin::kModelRate) > 1e-9) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("estimate_sequence: expected {} Hz, got {} Hz", kin::kModelRate, traj.sample_rate));
  }
  if (traj.size() < kin::kWindowLength) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("estimate_sequence: need at least {} samples, got {}", kin::kWindowLength, traj.size()));
  }
  const auto ws = kin::windows(kin::differentiate(traj), stride);
  const Tensor y = net.infer(make_input(ws.windows, net.stats));

  const std::size_t n = traj.size();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t b = 0; b < ws.windows.size(); ++b) {
    const std::size_t c0 = ws.windows[b].center_begin();
    for (std::size_t j = 0; j < kin::kCenterLength; ++j) {
      sum[c0 + j] += y.at(b, 0, j);
      ++count[c0 + j];
    }
  }
  Estimate est;
  est.mcl.sample_rate = traj.sample_rate;
  est.mcl.values.assign(n, 0.0);
  est.filled.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] > 0) est.mcl.values[i] = sum[i] / static_cast<double>(count[i]);
  }
  for (std::size_t i : ws.uncovered) {
    const std::size_t nearest = i < ws.covered_begin ? ws.covered_begin : ws.covered_end - 1;
    est.mcl.values[i] = est.mcl.values[nearest];
    est.filled[i] = true;
  }
  return est;
}

std::vector<double> stationary_mcl_map(const MclNet& net, std::span<const kin::HeadPose> poses) {
  require_trained(net);
  std::vector<kin::MotionWindow> ws;
  ws.reserve(poses.size());
  for (const auto& p : poses) ws.push_back(kin::stationary_window(p));
  const Tensor y = net.infer(make_input(ws, net.stats));
  std::vector<double> out(poses.size());
  for (std::size_t b = 0; b < poses.size(); ++b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kin::kCenterLength; ++j) acc += y.at(b, 0, j);
    out[b] = acc / static_cast<double>(kin::kCenterLength);
  }
  return out;
}

std::vector<TrainingSample> make_samples(const kin::TimedTrajectory& traj, const emg::MclSequence& mcl,
                                         std::size_t stride, int target_shift, std::size_t phase) {
  if (traj.size() != mcl.size()) {
    throw Error(ErrorCode::Shape, fmt::format("make_samples: trajectory has {} samples, MCL has {}",
                                              traj.size(), mcl.size()));
  }
  if (stride == 0 || stride > kin::kCenterLength) throw Error(ErrorCode::InvalidInput, "make_samples: stride must be in [1, 4]");
  const auto ws = kin::windows(kin::differentiate(traj), 1);
  std::vector<TrainingSample> out;
  out.reserve(ws.windows.size() / stride + 1);
  const auto n = static_cast<std::ptrdiff_t>(mcl.size());
  for (const auto& w : ws.windows) {
    if (w.begin % stride != phase % stride) continue;
    const auto first = static_cast<std::ptrdiff_t>(w.center_begin()) + target_shift;
    const auto last = first + static_cast<std::ptrdiff_t>(kin::kCenterLength);
    if (first < 0 || last > n) continue;
    TrainingSample s{w, {}};
    for (std::size_t j = 0; j < kin::kCenterLength; ++j) {
      s.target[j] = mcl.values[static_cast<std::size_t>(first) + j];
    }
    out.push_back(s);
  }
  return out;
}

InputStats fit_stats(std::span<const TrainingSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidInput, "fit_stats: no samples");
  // Each sample contributes its center samples only, so overlapping windows
  // at stride 4 count every time step once.
  std::array<double, 2> sum{}, sum_sq{}, acc_sq{};
  double n = 0.0;
  for (const auto& s : samples) {
    for (std::size_t t = kin::kCenterOffset; t < kin::kCenterOffset + kin::kCenterLength; ++t) {
      const double v[2] = {s.window.pose[t].pitch, s.window.pose[t].yaw};
      const double a[2] = {s.window.acceleration[t].pitch, s.window.acceleration[t].yaw};
      for (std::size_t c = 0; c < 2; ++c) {
        sum[c] += v[c];
        sum_sq[c] += v[c] * v[c];
        acc_sq[c] += a[c] * a[c];
      }
      n += 1.0;
    }
  }
  InputStats st;
  for (std::size_t c = 0; c < 2; ++c) {
    st.pose_mean[c] = sum[c] / n;
    const double var = std::max(sum_sq[c] / n - st.pose_mean[c] * st.pose_mean[c], 0.0);
    st.pose_std[c] = var > 1e-12 ? std::sqrt(var) : 1.0;
    const double arms = std::sqrt(acc_sq[c] / n);
    st.accel_std[c] = arms > 1e-12 ? arms : 1.0;
  }
  return st;
}

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config) {
  if (samples.empty()) throw Error(ErrorCode::InvalidInput, "mclnet train: empty dataset");
  TrainResult result;
  Rng init_rng(derive_seed(config.seed, "mclnet.init"));
  Rng shuffle_rng(derive_seed(config.seed, "mclnet.shuffle"));
  result.net.init(init_rng);
  result.net.stats = fit_stats(samples);

  std::vector<kin::MotionWindow> windows;
  windows.reserve(samples.size());
  for (const auto& s : samples) windows.push_back(s.window);
  const Tensor all_inputs = make_input(windows, result.net.stats);

  const nn::Schedule schedule{config.epochs, config.learning_rate, config.lr_drop_epoch,
                              config.lr_drop_factor, config.batch_size, config.weight_decay};
  const auto make_batch = [&](const std::vector<std::size_t>& idx) {
    nn::Batch batch{Tensor(idx.size(), kInputChannels, kin::kWindowLength),
                    Tensor(idx.size(), 1, kin::kCenterLength), Tensor(), idx};
    for (std::size_t b = 0; b < idx.size(); ++b) {
      for (std::size_t c = 0; c < kInputChannels; ++c) {
        const auto src = all_inputs.row(idx[b], c);
        std::copy(src.begin(), src.end(), batch.input.row(b, c).begin());
      }
      for (std::size_t j = 0; j < kin::kCenterLength; ++j) batch.target.at(b, 0, j) = samples[idx[b]].target[j];
    }
    return batch;
  };
  const auto loss = [](const Tensor& prediction, const nn::Batch& batch) {
    return nn::mse_loss(prediction, batch.target);
  };
  result.loss_history = nn::fit(result.net, samples.size(), schedule, shuffle_rng, make_batch, loss);
  result.net.trained = true;
  return result;
}

nn::Checkpoint to_checkpoint(MclNet& net) {
  nn::Checkpoint ckpt;
  ckpt.kind = kCheckpointKind;
  ckpt.metadata["trained"] = net.trained ? "true" : "false";
  ckpt.put("passive_torque_net", net.passive_torque_net().params());
  ckpt.put("torque_to_mcl_net", net.torque_to_mcl_net().params());
  ckpt.put_array("log_inertia", "value", {{1}, {net.log_inertia()}});
  const auto& s = net.stats;
  ckpt.put_array("input_stats", "pose_mean", {{2}, {s.pose_mean[0], s.pose_mean[1]}});
  ckpt.put_array("input_stats", "pose_std", {{2}, {s.pose_std[0], s.pose_std[1]}});
  ckpt.put_array("input_stats", "accel_std", {{2}, {s.accel_std[0], s.accel_std[1]}});
  return ckpt;
}

MclNet from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != kCheckpointKind) {
    throw Error(ErrorCode::Parse, fmt::format("expected a '{}' checkpoint, got '{}'", kCheckpointKind, ckpt.kind));
  }
  MclNet net;
  auto passive = net.passive_torque_net().params();
  ckpt.get("passive_torque_net", passive);
  auto torque = net.torque_to_mcl_net().params();
  ckpt.get("torque_to_mcl_net", torque);
  const auto read = [&](const char* section, const char* name, std::size_t n) {
    const auto& a = ckpt.array(section, name);
    if (a.values.size() != n) throw Error(ErrorCode::Parse, fmt::format("checkpoint: bad size for {}/{}", section, name));
    return a.values;
  };
  net.log_inertia() = read("log_inertia", "value", 1)[0];
  const auto pm = read("input_stats", "pose_mean", 2);
  const auto ps = read("input_stats", "pose_std", 2);
  const auto as = read("input_stats", "accel_std", 2);
  for (std::size_t c = 0; c < 2; ++c) {
    if (!(ps[c] > 0.0) || !(as[c] > 0.0)) throw Error(ErrorCode::Parse, "checkpoint: standardisation std must be positive");
    net.stats.pose_mean[c] = pm[c];
    net.stats.pose_std[c] = ps[c];
    net.stats.accel_std[c] = as[c];
  }
  const auto it = ckpt.metadata.find("trained");
  net.trained = it != ckpt.metadata.end() && it->second == "true";
  return net;
}

}  // namespace neckmcl::mcl

#include "neckmcl/trajnet.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "neckmcl/error.hpp"
#include "neckmcl/nn/trainer.hpp"

namespace neckmcl::trajnet {

const char* to_string(LossSpace space) { return space == LossSpace::Curve ? "curve" : "parameters"; }

LossSpace parse_loss_space(const std::string& text) {
  if (text == "parameters") return LossSpace::Parameters;
  if (text == "curve") return LossSpace::Curve;
  throw Error(ErrorCode::Config, fmt::format("unknown trajnet loss '{}' (parameters or curve)", text));
}

using nn::Tensor;

namespace {

constexpr std::size_t kHidden = 20;

double displacement(const Example& e, std::size_t axis) {
  const kin::HeadPose d = e.end - e.start;
  return axis == 0 ? d.pitch : d.yaw;
}

std::array<double, kInputs> raw_input(kin::HeadPose start, kin::HeadPose end) {
  const kin::HeadPose d = end - start;
  return {start.pitch, start.yaw, d.pitch, d.yaw};
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  if (v.empty()) {
    mean = 0.0;
    sd = 1.0;
    return;
  }
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size()));
  if (!(sd > 1e-12)) sd = 1.0;
}

// Width = softplus(u), u = o * scale + offset, with the offset placing o = 0
// at the mean training width and the scale matching the width std there.
struct WidthMap {
  double offset, scale;
  WidthMap(const Stats& st, std::size_t axis)
      : offset(nn::softplus_inverse(st.width_mean[axis])),
        scale(st.width_std[axis] / nn::sigmoid(nn::softplus_inverse(st.width_mean[axis]))) {}
  double width(double o) const { return nn::softplus(o * scale + offset); }
  double slope(double o) const { return nn::sigmoid(o * scale + offset) * scale; }
};

}  // namespace

TrajectoryNet::TrajectoryNet() {
  net_.add(nn::FullyConnected(kInputs, kHidden));
  net_.add(nn::BatchNorm1D(kHidden));
  net_.add(nn::ReLU{});
  net_.add(nn::FullyConnected(kHidden, kHidden));
  net_.add(nn::BatchNorm1D(kHidden));
  net_.add(nn::ReLU{});
  net_.add(nn::FullyConnected(kHidden, kOutputs));
}

void TrajectoryNet::init(Rng& rng) {
  net_.init(rng);
  trained = false;
}

Tensor make_input(std::span<const Example> examples, const Stats& stats) {
  Tensor x(examples.size(), kInputs, 1);
  for (std::size_t b = 0; b < examples.size(); ++b) {
    const auto raw = raw_input(examples[b].start, examples[b].end);
    for (std::size_t c = 0; c < kInputs; ++c) x.at(b, c, 0) = (raw[c] - stats.input_mean[c]) / stats.input_std[c];
  }
  return x;
}

Stats fit_stats(std::span<const Example> examples) {
  if (examples.empty()) throw Error(ErrorCode::InvalidInput, "trajnet fit_stats: no examples");
  Stats st;
  for (std::size_t c = 0; c < kInputs; ++c) {
    std::vector<double> v;
    v.reserve(examples.size());
    for (const auto& e : examples) v.push_back(raw_input(e.start, e.end)[c]);
    mean_std(v, st.input_mean[c], st.input_std[c]);
  }
  for (std::size_t axis = 0; axis < 2; ++axis) {
    std::vector<double> amp, center, width;
    for (const auto& e : examples) {
      amp.push_back(e.profile[axis].amplitude);
      if (displacement(e, axis) == 0.0) continue;
      center.push_back(e.profile[axis].center);
      width.push_back(e.profile[axis].width);
    }
    mean_std(amp, st.amplitude_mean[axis], st.amplitude_std[axis]);
    mean_std(center, st.center_mean[axis], st.center_std[axis]);
    mean_std(width, st.width_mean[axis], st.width_std[axis]);
  }
  return st;
}

traj::ProfilePair decode(const Tensor& output, std::size_t b, const Stats& stats, kin::HeadPose start,
                         kin::HeadPose end) {
  traj::ProfilePair pair;
  const kin::HeadPose d = end - start;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double disp = axis == 0 ? d.pitch : d.yaw;
    auto& g = pair[axis];
    const double amp = output.at(b, axis, 0) * stats.amplitude_std[axis] + stats.amplitude_mean[axis];
    g.center = std::max(0.0, output.at(b, 2 + axis, 0) * stats.center_std[axis] + stats.center_mean[axis]);
    g.width = WidthMap(stats, axis).width(output.at(b, 4 + axis, 0));
    if (!(g.width > 0.0)) g.width = std::numeric_limits<double>::min();
    if (disp == 0.0) {
      g.amplitude = 0.0;
      g.degenerate = true;
    } else {
      g.amplitude = std::copysign(std::abs(amp), disp);
    }
  }
  return pair;
}

traj::ProfilePair predict_profile(const TrajectoryNet& net, kin::HeadPose start, kin::HeadPose end) {
  if (!net.trained) throw Error(ErrorCode::State, "TrajectoryNet: parameters are untrained");
  if (!kin::is_finite(start) || !kin::is_finite(end)) {
    throw Error(ErrorCode::InvalidInput, "predict_profile: non-finite pose");
  }
  const Example e{start, end, {}};
  const Tensor y = net.infer(make_input({&e, 1}, net.stats));
  return decode(y, 0, net.stats, start, end);
}

nn::LossResult curve_loss(const Tensor& out, std::span<const Example> examples, const Stats& st) {
  if (out.batch() != examples.size() || out.channels() != kOutputs || out.time() != 1) {
    throw Error(ErrorCode::Shape, "curve_loss: output does not match the examples");
  }
  const std::array<WidthMap, 2> maps{WidthMap(st, 0), WidthMap(st, 1)};
  // Fitted profiles sampled at 20 Hz up to the later axis' mu + 3 sigma.
  const auto horizon = [](const Example& e) {
    double t = 0.0;
    for (std::size_t axis = 0; axis < 2; ++axis) {
      if (displacement(e, axis) != 0.0) t = std::max(t, e.profile[axis].center + 3.0 * e.profile[axis].width);
    }
    return static_cast<std::size_t>(std::ceil(t * kin::kModelRate)) + 1;
  };
  nn::LossResult r{0.0, Tensor(out.batch(), kOutputs, 1)};
  std::size_t terms = 0;
  for (std::size_t b = 0; b < out.batch(); ++b) {
    const Example& e = examples[b];
    const std::size_t n = horizon(e);
    terms += 2 * n;
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const double a = out.at(b, axis, 0) * st.amplitude_std[axis] + st.amplitude_mean[axis];
      const double mu = out.at(b, 2 + axis, 0) * st.center_std[axis] + st.center_mean[axis];
      const double ow = out.at(b, 4 + axis, 0);
      const double sigma = maps[axis].width(ow);
      traj::GaussianProfile target = e.profile[axis];
      if (displacement(e, axis) == 0.0) target.amplitude = 0.0;
      const double inv = 1.0 / st.amplitude_std[axis];
      double ga = 0.0, gmu = 0.0, gsigma = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / kin::kModelRate;
        const double z = (t - mu) / sigma;
        const double shape = std::exp(-0.5 * z * z);
        const double diff = (a * shape - target.velocity(t)) * inv;
        r.loss += diff * diff;
        const double d = 2.0 * diff * inv;
        ga += d * shape;
        gmu += d * a * shape * z / sigma;
        gsigma += d * a * shape * z * z / sigma;
      }
      r.grad.at(b, axis, 0) = ga * st.amplitude_std[axis];
      r.grad.at(b, 2 + axis, 0) = gmu * st.center_std[axis];
      r.grad.at(b, 4 + axis, 0) = gsigma * maps[axis].slope(ow);
    }
  }
  const double scale = 1.0 / static_cast<double>(terms);
  r.loss *= scale;
  for (double& g : r.grad.values()) g *= scale;
  return r;
}

TrainResult train(std::span<const Example> examples, const TrainConfig& config) {
  if (examples.empty()) throw Error(ErrorCode::InvalidInput, "trajnet train: empty dataset");
  TrainResult result;
  Rng init_rng(derive_seed(config.seed, "trajnet.init"));
  Rng shuffle_rng(derive_seed(config.seed, "trajnet.shuffle"));
  result.net.init(init_rng);
  result.net.stats = fit_stats(examples);
  const Stats& st = result.net.stats;
  const Tensor inputs = make_input(examples, st);

  const auto make_batch = [&](const std::vector<std::size_t>& idx) {
    nn::Batch batch{Tensor(idx.size(), kInputs, 1), Tensor(idx.size(), kOutputs, 1),
                    Tensor(idx.size(), kOutputs, 1, 1.0), idx};
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const Example& e = examples[idx[b]];
      for (std::size_t c = 0; c < kInputs; ++c) batch.input.at(b, c, 0) = inputs.at(idx[b], c, 0);
      for (std::size_t axis = 0; axis < 2; ++axis) {
        const auto& g = e.profile[axis];
        batch.target.at(b, axis, 0) = (g.amplitude - st.amplitude_mean[axis]) / st.amplitude_std[axis];
        batch.target.at(b, 2 + axis, 0) = (g.center - st.center_mean[axis]) / st.center_std[axis];
        batch.target.at(b, 4 + axis, 0) = (g.width - st.width_mean[axis]) / st.width_std[axis];
        if (displacement(e, axis) == 0.0) {
          batch.weight.at(b, 2 + axis, 0) = 0.0;
          batch.weight.at(b, 4 + axis, 0) = 0.0;
        }
      }
    }
    return batch;
  };
  // Width outputs are mapped to seconds and standardised before the
  // weighted squared error; the chain rule is applied here.
  const std::array<WidthMap, 2> maps{WidthMap(st, 0), WidthMap(st, 1)};
  const auto loss = [&](const Tensor& out, const nn::Batch& batch) {
    Tensor pred = out;
    Tensor slope(out.batch(), kOutputs, 1, 1.0);
    for (std::size_t b = 0; b < out.batch(); ++b) {
      for (std::size_t axis = 0; axis < 2; ++axis) {
        const double o = out.at(b, 4 + axis, 0);
        pred.at(b, 4 + axis, 0) = (maps[axis].width(o) - st.width_mean[axis]) / st.width_std[axis];
        slope.at(b, 4 + axis, 0) = maps[axis].slope(o) / st.width_std[axis];
      }
    }
    nn::LossResult r = nn::mse_loss(pred, batch.target, batch.weight);
    auto g = r.grad.values();
    const auto s = slope.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= s[i];
    return r;
  };
  const auto chosen = [&](const Tensor& out, const nn::Batch& batch) {
    if (config.loss == LossSpace::Parameters) return loss(out, batch);
    std::vector<Example> chunk;
    chunk.reserve(batch.index.size());
    for (std::size_t i : batch.index) chunk.push_back(examples[i]);
    return curve_loss(out, chunk, st);
  };
  const nn::Schedule schedule{config.epochs, config.learning_rate, config.lr_drop_epoch,
                              config.lr_drop_factor, config.batch_size, config.weight_decay};
  result.loss_history = nn::fit(result.net, examples.size(), schedule, shuffle_rng, make_batch, chosen);
  result.net.trained = true;
  return result;
}

Forecast forecast(const TrajectoryNet& tnet, const mcl::MclNet& mnet, kin::HeadPose start, kin::HeadPose end,
                  std::size_t stride) {
  Forecast f;
  f.profile = predict_profile(tnet, start, end);
  f.synthesis = traj::synthesize(f.profile, start, end, kin::kModelRate);
  if (start == end) {
    f.mcl.clear();
    return f;
  }
  const auto& moving = f.synthesis.trajectory.poses;
  kin::TimedTrajectory padded;
  padded.sample_rate = kin::kModelRate;
  padded.poses.assign(kForecastPad, start);
  padded.poses.insert(padded.poses.end(), moving.begin(), moving.end());
  padded.poses.insert(padded.poses.end(), kForecastPad, end);
  const auto est = mcl::estimate_sequence(mnet, padded, stride);
  f.mcl.assign(est.mcl.values.begin() + static_cast<std::ptrdiff_t>(kForecastPad),
               est.mcl.values.begin() + static_cast<std::ptrdiff_t>(kForecastPad + moving.size()));
  f.cumulative_mcl = traj::trapezoid(f.mcl, 1.0 / kin::kModelRate);
  return f;
}

double cumulative_mcl(kin::HeadPose start, kin::HeadPose end, const TrajectoryNet& tnet, const mcl::MclNet& mnet,
                      std::size_t stride) {
  return forecast(tnet, mnet, start, end, stride).cumulative_mcl;
}

nn::Checkpoint to_checkpoint(TrajectoryNet& net) {
  nn::Checkpoint ckpt;
  ckpt.kind = kCheckpointKind;
  ckpt.metadata["trained"] = net.trained ? "true" : "false";
  ckpt.put("network", net.params());
  const Stats& s = net.stats;
  const auto put2 = [&](const char* name, const std::array<double, 2>& a) {
    ckpt.put_array("stats", name, {{2}, {a[0], a[1]}});
  };
  ckpt.put_array("stats", "input_mean", {{kInputs}, {s.input_mean.begin(), s.input_mean.end()}});
  ckpt.put_array("stats", "input_std", {{kInputs}, {s.input_std.begin(), s.input_std.end()}});
  put2("amplitude_mean", s.amplitude_mean);
  put2("amplitude_std", s.amplitude_std);
  put2("center_mean", s.center_mean);
  put2("center_std", s.center_std);
  put2("width_mean", s.width_mean);
  put2("width_std", s.width_std);
  return ckpt;
}

TrajectoryNet from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != kCheckpointKind) {
    throw Error(ErrorCode::Parse, fmt::format("expected a '{}' checkpoint, got '{}'", kCheckpointKind, ckpt.kind));
  }
  TrajectoryNet net;
  auto params = net.params();
  ckpt.get("network", params);
  const auto read = [&](const char* name, auto& dest) {
    const auto& a = ckpt.array("stats", name);
    if (a.values.size() != dest.size()) throw Error(ErrorCode::Parse, fmt::format("checkpoint: bad size for stats/{}", name));
    std::copy(a.values.begin(), a.values.end(), dest.begin());
  };
  Stats& s = net.stats;
  read("input_mean", s.input_mean);
  read("input_std", s.input_std);
  read("amplitude_mean", s.amplitude_mean);
  read("amplitude_std", s.amplitude_std);
  read("center_mean", s.center_mean);
  read("center_std", s.center_std);
  read("width_mean", s.width_mean);
  read("width_std", s.width_std);
  const auto it = ckpt.metadata.find("trained");
  net.trained = it != ckpt.metadata.end() && it->second == "true";
  return net;
}

}  // namespace neckmcl::trajnet

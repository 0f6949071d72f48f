#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neckmcl/kinematics.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/nn/checkpoint.hpp"
#include "neckmcl/nn/sequential.hpp"
#include "neckmcl/trajectory.hpp"

namespace neckmcl::trajnet {

/// Output layout: amplitude (pitch, yaw), center (pitch, yaw), width (pitch, yaw).
inline constexpr std::size_t kInputs = 4;
inline constexpr std::size_t kOutputs = 6;

struct Stats {
  std::array<double, kInputs> input_mean{};
  std::array<double, kInputs> input_std{1.0, 1.0, 1.0, 1.0};
  std::array<double, 2> amplitude_mean{}, amplitude_std{1.0, 1.0};
  std::array<double, 2> center_mean{}, center_std{1.0, 1.0};
  std::array<double, 2> width_mean{}, width_std{1.0, 1.0};
};

class TrajectoryNet {
 public:
  TrajectoryNet();

  void init(Rng& rng);
  nn::Tensor forward(const nn::Tensor& x, nn::Mode mode) { return net_.forward(x, mode); }
  nn::Tensor infer(const nn::Tensor& x) const { return net_.infer(x); }
  nn::Tensor backward(const nn::Tensor& dy) { return net_.backward(dy); }
  std::vector<nn::ParamRef> params() { return net_.params(); }
  void zero_grad() { net_.zero_grad(); }

  nn::Sequential& network() { return net_; }

  Stats stats;
  bool trained = false;

 private:
  nn::Sequential net_;
};

struct Example {
  kin::HeadPose start;
  kin::HeadPose end;
  traj::ProfilePair profile;
};

/// Standardised (B, 4, 1) input for (r_s, r_e - r_s).
nn::Tensor make_input(std::span<const Example> examples, const Stats& stats);
Stats fit_stats(std::span<const Example> examples);

/// Maps raw network outputs for one example to a profile pair: amplitude
/// sign forced to the displacement sign, widths through softplus, centers
/// clamped at 0. Zero-displacement axes are degenerate with zero amplitude.
traj::ProfilePair decode(const nn::Tensor& output, std::size_t b, const Stats& stats,
                         kin::HeadPose start, kin::HeadPose end);

/// Throws State on an untrained network.
traj::ProfilePair predict_profile(const TrajectoryNet& net, kin::HeadPose start, kin::HeadPose end);

/// Parameters: squared error on the six standardised profile parameters.
/// Curve: squared error between the predicted and fitted velocity curves,
/// sampled at 20 Hz and scaled by the amplitude std per axis.
enum class LossSpace { Parameters, Curve };

const char* to_string(LossSpace space);
LossSpace parse_loss_space(const std::string& text);

struct TrainConfig {
  std::size_t epochs = 25;
  double learning_rate = 1e-3;
  std::size_t lr_drop_epoch = 15;
  double lr_drop_factor = 0.1;
  std::size_t batch_size = 64;
  double weight_decay = 1e-5;
  std::uint64_t seed = 1;
  LossSpace loss = LossSpace::Parameters;
};

/// Curve-space loss and its gradient with respect to the raw network
/// outputs, one output row per example.
nn::LossResult curve_loss(const nn::Tensor& output, std::span<const Example> examples, const Stats& stats);

struct TrainResult {
  TrajectoryNet net;
  std::vector<double> loss_history;
};

/// Parameter-space loss masks the center and width terms of
/// zero-displacement axes; curve-space loss needs no mask since the target
/// curve is zero there.
TrainResult train(std::span<const Example> examples, const TrainConfig& config);

struct Forecast {
  double cumulative_mcl = 0.0;  ///< MCL * s over [0, t_e]
  traj::ProfilePair profile;
  traj::Synthesis synthesis;
  std::vector<double> mcl;  ///< predicted MCL over the movement samples
};

/// Number of stationary samples padded on each side of a synthesized
/// movement before MCL estimation.
inline constexpr std::size_t kForecastPad = 4;

/// Predicts the profile, synthesizes the movement and integrates the
/// estimated MCL over it with the trapezoid rule at 20 Hz.
Forecast forecast(const TrajectoryNet& tnet, const mcl::MclNet& mnet, kin::HeadPose start,
                  kin::HeadPose end, std::size_t stride = kin::kDefaultStride);

double cumulative_mcl(kin::HeadPose start, kin::HeadPose end, const TrajectoryNet& tnet,
                      const mcl::MclNet& mnet, std::size_t stride = kin::kDefaultStride);

inline constexpr const char* kCheckpointKind = "trajnet";

nn::Checkpoint to_checkpoint(TrajectoryNet& net);
TrajectoryNet from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace neckmcl::trajnet

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "neckmcl/emg.hpp"
#include "neckmcl/kinematics.hpp"
#include "neckmcl/nn/checkpoint.hpp"
#include "neckmcl/nn/sequential.hpp"

namespace neckmcl::mcl {

/// Pose channels are standardised; acceleration is divided by its std only,
/// so zero acceleration stays exactly zero inside the network.
struct InputStats {
  std::array<double, 2> pose_mean{0.0, 0.0};
  std::array<double, 2> pose_std{1.0, 1.0};
  std::array<double, 2> accel_std{1.0, 1.0};
};

/// Network input layout, (batch, 4, 8): pitch, yaw, alpha_pitch, alpha_yaw.
inline constexpr std::size_t kInputChannels = 4;

/// MCL = E(I * alpha - T_p(r)). T_p and E are small convolutional stacks;
/// I = exp(log_inertia).
class MclNet {
 public:
  MclNet();

  void init(Rng& rng);
  nn::Tensor forward(const nn::Tensor& x, nn::Mode mode);
  nn::Tensor infer(const nn::Tensor& x) const;
  nn::Tensor backward(const nn::Tensor& dy);
  std::vector<nn::ParamRef> params();
  void zero_grad();

  struct Trace {
    nn::Tensor passive_torque;  ///< (B, 2, 8)
    nn::Tensor active_torque;   ///< (B, 2, 8)
    nn::Tensor mcl;             ///< (B, 1, 4)
  };
  /// Eval-mode forward exposing intermediate torques.
  Trace trace(const nn::Tensor& x) const;

  double inertia() const;
  double& log_inertia() { return log_inertia_; }

  nn::Sequential& passive_torque_net() { return passive_; }
  nn::Sequential& torque_to_mcl_net() { return torque_; }

  InputStats stats;
  bool trained = false;

 private:
  nn::Sequential passive_;
  nn::Sequential torque_;
  double log_inertia_ = 0.0;
  double grad_log_inertia_ = 0.0;
  nn::Tensor accel_;
  bool cached_ = false;
};

nn::Tensor make_input(std::span<const kin::MotionWindow> windows, const InputStats& stats);

/// Four central MCL values for one window. Throws InvalidInput on
/// non-finite input and State on an untrained network.
std::array<double, 4> forward(const MclNet& net, const kin::MotionWindow& window);

struct Estimate {
  emg::MclSequence mcl;
  std::vector<bool> filled;  ///< boundary samples copied from the nearest prediction
};

/// Sliding-window inference over a 20 Hz trajectory. Overlapping centers
/// (stride < 4) are averaged.
Estimate estimate_sequence(const MclNet& net, const kin::TimedTrajectory& traj,
                           std::size_t stride = kin::kDefaultStride);

/// Mean central output of a constant-pose window at each pose.
std::vector<double> stationary_mcl_map(const MclNet& net, std::span<const kin::HeadPose> poses);

struct TrainingSample {
  kin::MotionWindow window;
  std::array<double, 4> target{};
};

/// Windows of one session with targets at the window centers. A nonzero
/// `target_shift` pairs each window with targets `shift` samples later
/// (negative: earlier); windows whose shifted targets fall outside the
/// sequence are skipped. Windows start at `phase` modulo `stride`.
std::vector<TrainingSample> make_samples(const kin::TimedTrajectory& traj, const emg::MclSequence& mcl,
                                         std::size_t stride = kin::kDefaultStride,
                                         int target_shift = 0, std::size_t phase = 0);

InputStats fit_stats(std::span<const TrainingSample> samples);

struct TrainConfig {
  std::size_t epochs = 20;
  double learning_rate = 1e-3;
  std::size_t lr_drop_epoch = 10;
  double lr_drop_factor = 0.1;
  std::size_t batch_size = 64;
  double weight_decay = 5e-4;
  std::uint64_t seed = 1;
};

struct TrainResult {
  MclNet net;
  std::vector<double> loss_history;  ///< mean train loss per epoch
};

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config);

nn::Checkpoint to_checkpoint(MclNet& net);
MclNet from_checkpoint(const nn::Checkpoint& ckpt);

inline constexpr const char* kCheckpointKind = "mclnet";

}  // namespace neckmcl::mcl

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neckmcl/emg.hpp"
#include "neckmcl/kinematics.hpp"
#include "neckmcl/rng.hpp"
#include "neckmcl/trajectory.hpp"

namespace neckmcl::oracle {

/// Known biomechanics used to generate data. Torques are in deg/s^2 per unit
/// inertia, angles in degrees.
struct OracleConfig {
  double inertia = 1.0;
  double gravity_gain = 600.0;   ///< g_p
  double pitch_offset = 20.0;    ///< p_0, degrees
  double yaw_gain = 600.0;       ///< k_y
  double weight_pitch = 1.95e-6; ///< w_p
  double weight_yaw = 8.6e-7;    ///< w_y
  double baseline = 0.088;       ///< b
  double cap = 1.0;
  double exponent = 2.0;         ///< E*(T) = b + sum_i w_i |T_i|^exponent, capped

  double sigma0 = 0.06;          ///< s
  double sigma_slope = 0.003;    ///< s per degree
  double sigma_jitter = 0.05;    ///< relative, uniform in [-j, j]
  double velocity_noise = 0.03;  ///< relative to the local Gaussian envelope
  double noise_smoothing = 0.5;  ///< first-order smoothing coefficient of the noise
  double max_velocity_pitch = 182.0, max_velocity_yaw = 238.0;
  double max_accel_pitch = 388.0, max_accel_yaw = 507.0;
  double accel_headroom = 0.9;   ///< fraction of the acceleration bound used by the width floor

  double emg_scale = 0.5;          ///< mV of carrier RMS at MCL 1 and full share
  double drift_amplitude = 0.2;    ///< mV
  double drift_max_hz = 0.8;
  double gain_min = 0.5, gain_max = 2.0;
  double lateral_velocity = 100.0; ///< deg/s of yaw velocity giving full lateral load

  double stationary_s = 2.0;
  double hold_s = 1.0;
  std::size_t participants_pilot = 8;
  std::size_t participants_eval = 6;

  bool calibrated = false;
};

struct StationaryTargets {
  double neutral = 0.17;        ///< MCL at (0, 0)
  double corner = 0.68;         ///< MCL at (30, 50)
  double grid_mean = 0.32;      ///< mean over the 63 pilot anchors
  double yaw_zero = 0.21;       ///< mean over anchors with yaw 0
  double yaw_extreme = 0.47;    ///< mean over anchors with |yaw| 50
  double pitch_up = 0.49;       ///< mean over anchors with pitch +30
  double pitch_down = 0.27;     ///< mean over anchors with pitch -30
  double secondary_weight = 0.1;
  double tolerance = 0.02;      ///< per primary target
};

/// T_p* = (-g_p sin(p + p_0), -k_y sin(y)).
kin::AxisPair passive_torque(const OracleConfig& cfg, kin::HeadPose pose);
/// T_a* = I* alpha - T_p*.
kin::AxisPair active_torque(const OracleConfig& cfg, kin::HeadPose pose, kin::AxisPair accel);
/// E*(T_a) = min(cap, b + w_p |T_a_p|^e + w_y |T_a_y|^e).
double mcl_of_torque(const OracleConfig& cfg, kin::AxisPair active);
double oracle_mcl(const OracleConfig& cfg, kin::HeadPose pose, kin::AxisPair accel);

/// MCL along a trajectory, from differentiate()'d accelerations.
emg::MclSequence oracle_sequence(const OracleConfig& cfg, const kin::TimedTrajectory& traj);

struct CalibrationReport {
  double neutral = 0.0, corner = 0.0, grid_mean = 0.0;
  double yaw_zero = 0.0, yaw_extreme = 0.0, pitch_up = 0.0, pitch_down = 0.0;
  double max_primary_residual = 0.0;
  std::size_t iterations = 0;
};

/// Fits b, p_0, w_p and w_y to the stationary targets over the pilot anchor
/// grid (g_p and k_y stay fixed: only w * g^e is identifiable). Throws
/// CalibrationFailure when a primary residual exceeds the tolerance.
OracleConfig calibrate(const OracleConfig& base = {}, const StationaryTargets& targets = {},
                       CalibrationReport* report = nullptr);

/// Stationary map summary of a configuration.
CalibrationReport stationary_summary(const OracleConfig& cfg, const StationaryTargets& targets = {});

/// Main-sequence profile for one movement with jittered widths.
traj::ProfilePair movement_profile(const OracleConfig& cfg, kin::HeadPose start, kin::HeadPose end, Rng& rng);

struct Movement {
  kin::TimedTrajectory trajectory;  ///< 20 Hz, first sample start, last sample end
  traj::ProfilePair profile;        ///< before noise
};

/// Gaussian velocity movement at 20 Hz with smoothed multiplicative noise,
/// rescaled so the endpoint is exact.
Movement gen_movement(const OracleConfig& cfg, kin::HeadPose start, kin::HeadPose end, Rng& rng);

/// Per-session channel gains (left/right asymmetry) and drift.
struct EmgChannelModel {
  std::array<double, emg::kChannels> gain{1.0, 1.0, 1.0, 1.0};
  std::array<double, emg::kChannels> drift_hz{};
  std::array<double, emg::kChannels> drift_phase{};
  std::array<double, emg::kChannels> drift_amplitude{};
};

EmgChannelModel draw_channel_model(const OracleConfig& cfg, Rng& rng);

/// Raw 2000 Hz EMG whose envelope follows `mcl`. `yaw_velocity` (20 Hz,
/// same length, may be empty) sets the lateral load that shifts activation
/// between the left and right muscles.
emg::RawEmgRecord gen_emg(const OracleConfig& cfg, const emg::MclSequence& mcl,
                          const std::vector<double>& yaw_velocity, const EmgChannelModel& model, Rng& rng);

enum class Protocol { Pilot, Eval };

const char* to_string(Protocol p);
Protocol parse_protocol(const std::string& text);

/// 63 pilot anchors (pitch 0, +-10, +-20, +-30 by yaw 0, +-20, ..., +-50) or
/// the 16 evaluation anchors (pitch +-5, +-25 by yaw +-15, +-45).
std::vector<kin::HeadPose> anchors(Protocol p);

/// Offsets (dp, dy) with dp in {-35, 0, 35}, dy in {-25, 0, 25}, excluding (0, 0).
std::vector<kin::HeadPose> target_offsets();

struct Session {
  std::string id;
  std::size_t participant = 0;
  std::size_t anchor_index = 0;
  kin::HeadPose anchor;
  kin::HeadPose target;
  kin::TimedTrajectory trajectory;  ///< stationary, movement, hold at 20 Hz
  emg::MclSequence mcl;             ///< ground truth at 20 Hz
  std::size_t move_begin = 0;       ///< index of the movement's first sample (the anchor)
  std::size_t move_end = 0;         ///< index of its last sample (the target)
  traj::ProfilePair profile;        ///< generating profile before noise
  std::uint64_t seed = 0;
  std::optional<emg::RawEmgRecord> emg;
};

struct SyntheticDataset {
  Protocol protocol = Protocol::Pilot;
  std::uint64_t seed = 0;
  std::vector<kin::HeadPose> anchors;
  std::vector<Session> sessions;
};

struct GenOptions {
  bool with_emg = false;
  /// 0: protocol default participant count.
  std::size_t participants = 0;
};

/// Sessions for every participant, anchor and in-field target. Throws State
/// on an uncalibrated config.
SyntheticDataset gen_dataset(const OracleConfig& cfg, Protocol protocol, std::uint64_t seed,
                             const GenOptions& options = {});

/// Generates the movement portion of one session.
Session gen_session(const OracleConfig& cfg, kin::HeadPose anchor, kin::HeadPose target, std::uint64_t seed,
                    bool with_emg);

/// Hex digest of every numeric config field (FNV-1a over the printed values).
std::string config_hash(const OracleConfig& cfg);

}  // namespace neckmcl::oracle

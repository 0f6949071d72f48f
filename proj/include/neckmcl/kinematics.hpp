#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace neckmcl::kin {

/// Pitch/yaw head orientation in degrees. Negative pitch is down, negative
/// yaw is left.
struct HeadPose {
  double pitch = 0.0;
  double yaw = 0.0;

  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

inline HeadPose operator+(HeadPose a, HeadPose b) { return {a.pitch + b.pitch, a.yaw + b.yaw}; }
inline HeadPose operator-(HeadPose a, HeadPose b) { return {a.pitch - b.pitch, a.yaw - b.yaw}; }

/// Euclidean distance in the pitch-yaw plane, degrees.
inline double angular_distance(HeadPose a, HeadPose b) {
  return std::hypot(a.pitch - b.pitch, a.yaw - b.yaw);
}

/// Per-axis rate (deg/s or deg/s^2).
struct AxisPair {
  double pitch = 0.0;
  double yaw = 0.0;

  friend bool operator==(const AxisPair&, const AxisPair&) = default;
};

/// The 60 x 100 degree study field. Poses outside are flagged, not rejected.
struct StudyField {
  static constexpr double kPitchMin = -30.0;
  static constexpr double kPitchMax = 30.0;
  static constexpr double kYawMin = -50.0;
  static constexpr double kYawMax = 50.0;

  static bool contains(HeadPose pose, double tolerance = 1e-9) {
    return pose.pitch >= kPitchMin - tolerance && pose.pitch <= kPitchMax + tolerance &&
           pose.yaw >= kYawMin - tolerance && pose.yaw <= kYawMax + tolerance;
  }
};

bool is_finite(HeadPose pose);

/// Uniformly sampled pose sequence; sample i is at t = i / sample_rate.
struct TimedTrajectory {
  double sample_rate = 0.0;
  std::vector<HeadPose> poses;

  std::size_t size() const { return poses.size(); }
  double time_at(std::size_t i) const { return static_cast<double>(i) / sample_rate; }
  /// Time of the last sample; 0 for fewer than two samples.
  double duration() const;
};

struct KinematicsSequence {
  double sample_rate = 0.0;
  std::vector<HeadPose> pose;
  std::vector<AxisPair> velocity;
  std::vector<AxisPair> acceleration;

  std::size_t size() const { return pose.size(); }
};

inline constexpr double kModelRate = 20.0;
inline constexpr std::size_t kWindowLength = 8;
inline constexpr std::size_t kCenterOffset = 2;
inline constexpr std::size_t kCenterLength = 4;
inline constexpr std::size_t kDefaultStride = 4;

/// 400 ms of 20 Hz input. The model predicts the central 200 ms, samples
/// [begin + 2, begin + 6) of the source sequence.
struct MotionWindow {
  std::array<HeadPose, kWindowLength> pose{};
  std::array<AxisPair, kWindowLength> acceleration{};
  std::size_t begin = 0;

  std::size_t center_begin() const { return begin + kCenterOffset; }
  std::size_t center_end() const { return begin + kCenterOffset + kCenterLength; }
};

struct WindowSet {
  std::vector<MotionWindow> windows;
  /// Half-open index range covered by at least one window center.
  std::size_t covered_begin = 0;
  std::size_t covered_end = 0;
  /// Samples outside every window center, in ascending order.
  std::vector<std::size_t> uncovered;
};

/// Linear-interpolation resampling over the same time span.
TimedTrajectory resample(const TimedTrajectory& traj, double target_rate);

/// Central differences in the interior, one-sided at the endpoints.
KinematicsSequence differentiate(const TimedTrajectory& traj);

/// Sliding 8-sample windows. With the default stride 4 consecutive centers
/// tile the covered range; smaller strides overlap (averaged downstream).
WindowSet windows(const KinematicsSequence& kin, std::size_t stride = kDefaultStride);

/// Builds a constant-pose (stationary) window.
MotionWindow stationary_window(HeadPose pose);

}  // namespace neckmcl::kin

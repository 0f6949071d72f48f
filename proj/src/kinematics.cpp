#include "neckmcl/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "neckmcl/error.hpp"

namespace neckmcl::kin {

bool is_finite(HeadPose pose) { return std::isfinite(pose.pitch) && std::isfinite(pose.yaw); }

double TimedTrajectory::duration() const {
  if (poses.size() < 2) return 0.0;
  return static_cast<double>(poses.size() - 1) / sample_rate;
}

TimedTrajectory resample(const TimedTrajectory& traj, double target_rate) {
  if (traj.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "resample: trajectory needs at least 2 samples");
  }
  if (!(traj.sample_rate > 0.0) || !(target_rate > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "resample: sample rates must be positive");
  }
  const double ratio = traj.sample_rate / target_rate;
  const double last = static_cast<double>(traj.size() - 1);
  const auto count = static_cast<std::size_t>(std::floor(last / ratio + 1e-9)) + 1;

  TimedTrajectory out;
  out.sample_rate = target_rate;
  out.poses.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = std::min(static_cast<double>(k) * ratio, last);
    const auto i0 = static_cast<std::size_t>(std::floor(u));
    const double frac = u - static_cast<double>(i0);
    if (frac == 0.0 || i0 + 1 >= traj.size()) {
      out.poses.push_back(traj.poses[std::min(i0, traj.size() - 1)]);
      continue;
    }
    const HeadPose a = traj.poses[i0];
    const HeadPose b = traj.poses[i0 + 1];
    out.poses.push_back({a.pitch + frac * (b.pitch - a.pitch), a.yaw + frac * (b.yaw - a.yaw)});
  }
  return out;
}

namespace {

template <typename Get>
std::vector<AxisPair> finite_difference(std::size_t n, double rate, Get get) {
  std::vector<AxisPair> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    AxisPair lo;
    AxisPair hi;
    double scale = rate;
    if (i == 0) {
      lo = get(0);
      hi = get(1);
    } else if (i + 1 == n) {
      lo = get(n - 2);
      hi = get(n - 1);
    } else {
      lo = get(i - 1);
      hi = get(i + 1);
      scale = rate / 2.0;
    }
    d[i] = {(hi.pitch - lo.pitch) * scale, (hi.yaw - lo.yaw) * scale};
  }
  return d;
}

}  // namespace

KinematicsSequence differentiate(const TimedTrajectory& traj) {
  if (traj.size() < 3) {
    throw Error(ErrorCode::InvalidInput, "differentiate: trajectory needs at least 3 samples");
  }
  if (!(traj.sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "differentiate: sample rate must be positive");
  }
  KinematicsSequence kin;
  kin.sample_rate = traj.sample_rate;
  kin.pose = traj.poses;
  kin.velocity = finite_difference(traj.size(), traj.sample_rate, [&](std::size_t i) {
    return AxisPair{traj.poses[i].pitch, traj.poses[i].yaw};
  });
  kin.acceleration = finite_difference(traj.size(), traj.sample_rate,
                                       [&](std::size_t i) { return kin.velocity[i]; });
  return kin;
}

WindowSet windows(const KinematicsSequence& kin, std::size_t stride) {
  if (std::abs(kin.sample_rate - kModelRate) > 1e-9) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("windows: expected {} Hz input, got {} Hz", kModelRate, kin.sample_rate));
  }
  if (kin.size() < kWindowLength) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("windows: need at least {} samples, got {}", kWindowLength, kin.size()));
  }
  if (stride == 0 || stride > kCenterLength) {
    throw Error(ErrorCode::InvalidInput, "windows: stride must be in [1, 4]");
  }

  WindowSet set;
  std::size_t begin = 0;
  for (; begin + kWindowLength <= kin.size(); begin += stride) {
    MotionWindow w;
    w.begin = begin;
    for (std::size_t j = 0; j < kWindowLength; ++j) {
      w.pose[j] = kin.pose[begin + j];
      w.acceleration[j] = kin.acceleration[begin + j];
    }
    set.windows.push_back(w);
  }
  set.covered_begin = kCenterOffset;
  set.covered_end = set.windows.back().center_end();
  for (std::size_t i = 0; i < kin.size(); ++i) {
    if (i < set.covered_begin || i >= set.covered_end) set.uncovered.push_back(i);
  }
  return set;
}

MotionWindow stationary_window(HeadPose pose) {
  MotionWindow w;
  w.pose.fill(pose);
  w.acceleration.fill(AxisPair{});
  return w;
}

}  // namespace neckmcl::kin

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "neckmcl/kinematics.hpp"

namespace neckmcl::traj {

/// omega(t) = A exp(-(t - mu)^2 / (2 sigma^2)); t measured from movement onset.
struct GaussianProfile {
  double amplitude = 0.0;  ///< deg/s
  double center = 0.0;     ///< s
  double width = 0.1;      ///< s
  bool degenerate = false;

  double velocity(double t) const;
};

inline constexpr double kDefaultWidth = 0.1;

struct ProfilePair {
  GaussianProfile pitch;
  GaussianProfile yaw;

  GaussianProfile& operator[](std::size_t axis) { return axis == 0 ? pitch : yaw; }
  const GaussianProfile& operator[](std::size_t axis) const { return axis == 0 ? pitch : yaw; }
};

struct FitOptions {
  std::size_t max_iterations = 50;
  double tolerance = 1e-6;  ///< relative change of the residual sum of squares
};

struct FitResult {
  GaussianProfile profile;
  double nrmse = 0.0;  ///< percent of the curve's range
  std::size_t iterations = 0;
  bool converged = false;
};

/// Gauss-Newton fit of one velocity curve sampled at `sample_rate` from
/// t = 0. `displacement` seeds the width guess; pass NaN to take it from the
/// trapezoidal integral of the curve. An all-zero curve yields a degenerate
/// zero-amplitude profile with the default width.
FitResult fit_profile(std::span<const double> velocity, double sample_rate,
                      double displacement, const FitOptions& options = {});

/// Differentiates a single movement (t = 0 at its first sample) and fits
/// both axes.
std::array<FitResult, 2> fit_movement(const kin::TimedTrajectory& movement,
                                      const FitOptions& options = {});

/// Trapezoid rule over uniformly spaced samples.
double trapezoid(std::span<const double> y, double dt);

/// Cumulative trapezoid integration starting at `start`.
std::vector<double> cumulative(std::span<const double> velocity, double start, double dt);

/// max over moving axes of (mu + 3 sigma); 0 when neither axis moves.
double end_time(const ProfilePair& pair, kin::HeadPose start, kin::HeadPose end);

struct Synthesis {
  kin::TimedTrajectory trajectory;
  std::array<std::vector<double>, 2> velocity;  ///< rescaled omega per axis, deg/s
  ProfilePair rescaled;                          ///< amplitudes after rescaling
  std::array<double, 2> rescale{1.0, 1.0};       ///< rescaled / original amplitude
  double end_time = 0.0;
};

/// Samples both Gaussians on [0, t_e] at `sample_rate` (K = ceil(t_e * rate)
/// intervals), rescales each axis so its trapezoidal integral equals the
/// displacement, and integrates. The last pose is exactly `end`. A
/// zero-displacement axis gets zero velocity; start == end gives a single
/// sample.
Synthesis synthesize(const ProfilePair& pair, kin::HeadPose start, kin::HeadPose end,
                     double sample_rate = kin::kModelRate);

/// Rescales `velocity` in place so its trapezoidal integral is
/// `displacement` and returns the scale factor. Zero displacement zeroes the
/// curve and returns 0; a curve without area is InvalidInput.
double rescale_to_endpoint(std::vector<double>& velocity, double displacement, double dt);

}  // namespace neckmcl::traj

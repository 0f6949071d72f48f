#include "neckmcl/trajectory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "neckmcl/error.hpp"

namespace neckmcl::traj {

double GaussianProfile::velocity(double t) const {
  if (amplitude == 0.0) return 0.0;
  const double z = (t - center) / width;
  return amplitude * std::exp(-0.5 * z * z);
}

double trapezoid(std::span<const double> y, double dt) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * dt;
}

std::vector<double> cumulative(std::span<const double> velocity, double start, double dt) {
  std::vector<double> out(velocity.size(), start);
  for (std::size_t i = 1; i < velocity.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * dt * (velocity[i - 1] + velocity[i]);
  }
  return out;
}

namespace {

double curve_nrmse(std::span<const double> v, double rate, const GaussianProfile& g) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  double sse = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double r = g.velocity(static_cast<double>(k) / rate) - v[k];
    sse += r * r;
  }
  if (range <= 0.0) return 0.0;
  return 100.0 * std::sqrt(sse / static_cast<double>(v.size())) / range;
}

double sum_squares(std::span<const double> v, double rate, double a, double mu, double sigma) {
  double sse = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double t = static_cast<double>(k) / rate;
    const double z = (t - mu) / sigma;
    const double r = a * std::exp(-0.5 * z * z) - v[k];
    sse += r * r;
  }
  return sse;
}

}  // namespace

FitResult fit_profile(std::span<const double> velocity, double sample_rate, double displacement,
                      const FitOptions& options) {
  if (velocity.empty() || !(sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "fit_profile: empty curve or bad sample rate");
  }
  for (double v : velocity) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "fit_profile: non-finite sample");
  }
  FitResult result;
  const auto peak = std::max_element(velocity.begin(), velocity.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*peak == 0.0) {
    result.profile = {0.0, 0.0, kDefaultWidth, true};
    result.converged = true;
    return result;
  }

  const double dt = 1.0 / sample_rate;
  if (!std::isfinite(displacement)) displacement = trapezoid(velocity, dt);
  double a = *peak;
  double mu = static_cast<double>(peak - velocity.begin()) * dt;
  double sigma = std::abs(displacement) / (std::abs(a) * std::sqrt(2.0 * std::numbers::pi));
  sigma = std::max(sigma, 0.5 * dt);

  double sse = sum_squares(velocity, sample_rate, a, mu, sigma);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < velocity.size(); ++k) {
      const double t = static_cast<double>(k) * dt;
      const double d = t - mu;
      const double e = std::exp(-0.5 * d * d / (sigma * sigma));
      const double r = a * e - velocity[k];
      const Eigen::Vector3d j(e, a * e * d / (sigma * sigma), a * e * d * d / (sigma * sigma * sigma));
      jtj += j * j.transpose();
      jtr += j * r;
    }
    const Eigen::Vector3d step = jtj.ldlt().solve(-jtr);
    if (!step.allFinite()) break;

    double lambda = 1.0;
    double next_sse = sse;
    double na = a, nmu = mu, nsigma = sigma;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      na = a + lambda * step[0];
      nmu = mu + lambda * step[1];
      nsigma = sigma + lambda * step[2];
      if (nsigma <= 0.0) continue;
      next_sse = sum_squares(velocity, sample_rate, na, nmu, nsigma);
      if (next_sse <= sse) break;
    }
    result.iterations = it + 1;
    if (!(next_sse <= sse) || nsigma <= 0.0) {
      result.converged = true;
      break;
    }
    const double change = (sse - next_sse) / std::max(sse, std::numeric_limits<double>::min());
    a = na;
    mu = nmu;
    sigma = nsigma;
    sse = next_sse;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.profile = {a, std::max(mu, 0.0), sigma, false};
  result.nrmse = curve_nrmse(velocity, sample_rate, result.profile);
  return result;
}

std::array<FitResult, 2> fit_movement(const kin::TimedTrajectory& movement, const FitOptions& options) {
  const auto kin = kin::differentiate(movement);
  std::vector<double> vp(kin.size()), vy(kin.size());
  for (std::size_t i = 0; i < kin.size(); ++i) {
    vp[i] = kin.velocity[i].pitch;
    vy[i] = kin.velocity[i].yaw;
  }
  const kin::HeadPose delta = movement.poses.back() - movement.poses.front();
  return {fit_profile(vp, movement.sample_rate, delta.pitch, options),
          fit_profile(vy, movement.sample_rate, delta.yaw, options)};
}

double end_time(const ProfilePair& pair, kin::HeadPose start, kin::HeadPose end) {
  const kin::HeadPose delta = end - start;
  double te = 0.0;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double d = axis == 0 ? delta.pitch : delta.yaw;
    if (d == 0.0) continue;
    te = std::max(te, pair[axis].center + 3.0 * pair[axis].width);
  }
  return te;
}

double rescale_to_endpoint(std::vector<double>& velocity, double displacement, double dt) {
  if (displacement == 0.0) {
    std::fill(velocity.begin(), velocity.end(), 0.0);
    return 0.0;
  }
  const double area = trapezoid(velocity, dt);
  if (area == 0.0 || !std::isfinite(area)) {
    throw Error(ErrorCode::InvalidInput, "rescale_to_endpoint: velocity curve has no area");
  }
  const double s = displacement / area;
  for (double& v : velocity) v *= s;
  return s;
}

Synthesis synthesize(const ProfilePair& pair, kin::HeadPose start, kin::HeadPose end, double sample_rate) {
  if (!kin::is_finite(start) || !kin::is_finite(end) || !(sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "synthesize: non-finite pose or bad sample rate");
  }
  for (std::size_t axis = 0; axis < 2; ++axis) {
    if (!(pair[axis].width > 0.0) || !std::isfinite(pair[axis].center)) {
      throw Error(ErrorCode::InvalidInput, "synthesize: profile width must be positive");
    }
  }
  Synthesis out;
  out.trajectory.sample_rate = sample_rate;
  out.rescaled = pair;
  out.end_time = end_time(pair, start, end);
  if (start == end) {
    out.trajectory.poses = {start};
    out.velocity = {std::vector<double>{0.0}, std::vector<double>{0.0}};
    for (std::size_t axis = 0; axis < 2; ++axis) {
      out.rescaled[axis].amplitude = 0.0;
      out.rescale[axis] = 0.0;
    }
    return out;
  }

  const double dt = 1.0 / sample_rate;
  const auto k = static_cast<std::size_t>(std::ceil(out.end_time * sample_rate - 1e-9));
  const std::size_t n = std::max<std::size_t>(k, 1) + 1;
  const kin::HeadPose delta = end - start;
  std::array<std::vector<double>, 2> pos;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double d = axis == 0 ? delta.pitch : delta.yaw;
    const double s0 = axis == 0 ? start.pitch : start.yaw;
    GaussianProfile shape = pair[axis];
    shape.amplitude = 1.0;
    auto& v = out.velocity[axis];
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = d == 0.0 ? 0.0 : shape.velocity(static_cast<double>(i) * dt);
    const double s = rescale_to_endpoint(v, d, dt);
    out.rescaled[axis].amplitude = s;
    out.rescaled[axis].degenerate = d == 0.0;
    out.rescale[axis] = pair[axis].amplitude != 0.0 ? s / pair[axis].amplitude : 0.0;
    pos[axis] = cumulative(v, s0, dt);
    pos[axis].back() = axis == 0 ? end.pitch : end.yaw;
  }
  out.trajectory.poses.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.trajectory.poses[i] = {pos[0][i], pos[1][i]};
  return out;
}

}  // namespace neckmcl::traj

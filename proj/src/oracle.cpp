#include "neckmcl/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "neckmcl/error.hpp"
#include "neckmcl/iir.hpp"

namespace neckmcl::oracle {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double powabs(double x, double e) { return e == 2.0 ? x * x : std::pow(std::abs(x), e); }

}  // namespace

kin::AxisPair passive_torque(const OracleConfig& cfg, kin::HeadPose pose) {
  return {-cfg.gravity_gain * std::sin((pose.pitch + cfg.pitch_offset) * kDeg),
          -cfg.yaw_gain * std::sin(pose.yaw * kDeg)};
}

kin::AxisPair active_torque(const OracleConfig& cfg, kin::HeadPose pose, kin::AxisPair accel) {
  const kin::AxisPair tp = passive_torque(cfg, pose);
  return {cfg.inertia * accel.pitch - tp.pitch, cfg.inertia * accel.yaw - tp.yaw};
}

double mcl_of_torque(const OracleConfig& cfg, kin::AxisPair ta) {
  const double raw = cfg.baseline + cfg.weight_pitch * powabs(ta.pitch, cfg.exponent) +
                     cfg.weight_yaw * powabs(ta.yaw, cfg.exponent);
  return std::min(cfg.cap, raw);
}

double oracle_mcl(const OracleConfig& cfg, kin::HeadPose pose, kin::AxisPair accel) {
  return mcl_of_torque(cfg, active_torque(cfg, pose, accel));
}

emg::MclSequence oracle_sequence(const OracleConfig& cfg, const kin::TimedTrajectory& traj) {
  const auto kin = kin::differentiate(traj);
  emg::MclSequence out{traj.sample_rate, std::vector<double>(kin.size())};
  for (std::size_t i = 0; i < kin.size(); ++i) out.values[i] = oracle_mcl(cfg, kin.pose[i], kin.acceleration[i]);
  return out;
}

// ---------------------------------------------------------------- calibration

CalibrationReport stationary_summary(const OracleConfig& cfg, const StationaryTargets&) {
  CalibrationReport r;
  const auto at = [&](double p, double y) { return oracle_mcl(cfg, {p, y}, {}); };
  r.neutral = at(0, 0);
  r.corner = at(30, 50);
  double sum = 0.0, y0 = 0.0, y50 = 0.0, pu = 0.0, pd = 0.0;
  std::size_t n = 0, ny0 = 0, ny50 = 0, npu = 0, npd = 0;
  for (const auto& a : anchors(Protocol::Pilot)) {
    const double m = at(a.pitch, a.yaw);
    sum += m;
    ++n;
    if (a.yaw == 0.0) y0 += m, ++ny0;
    if (std::abs(a.yaw) == 50.0) y50 += m, ++ny50;
    if (a.pitch == 30.0) pu += m, ++npu;
    if (a.pitch == -30.0) pd += m, ++npd;
  }
  r.grid_mean = sum / static_cast<double>(n);
  r.yaw_zero = y0 / static_cast<double>(ny0);
  r.yaw_extreme = y50 / static_cast<double>(ny50);
  r.pitch_up = pu / static_cast<double>(npu);
  r.pitch_down = pd / static_cast<double>(npd);
  return r;
}

namespace {

constexpr double kBaselineMax = 0.3;
constexpr double kOffsetMax = 40.0;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

OracleConfig apply(const OracleConfig& base, const Eigen::VectorXd& u) {
  OracleConfig c = base;
  c.baseline = kBaselineMax * logistic(u[0]);
  c.pitch_offset = kOffsetMax * logistic(u[1]);
  c.weight_pitch = std::exp(u[2]) / std::pow(c.gravity_gain, c.exponent);
  c.weight_yaw = std::exp(u[3]) / std::pow(c.yaw_gain, c.exponent);
  return c;
}

struct CalibrationFunctor : Eigen::DenseFunctor<double> {
  const OracleConfig& base;
  const StationaryTargets& targets;

  CalibrationFunctor(const OracleConfig& b, const StationaryTargets& t)
      : Eigen::DenseFunctor<double>(4, 7), base(b), targets(t) {}

  int operator()(const InputType& u, ValueType& f) const {
    const auto r = stationary_summary(apply(base, u), targets);
    // Primaries dominate; the secondaries only pick among near-exact fits.
    constexpr double kPrimary = 100.0;
    const double w = std::sqrt(targets.secondary_weight);
    f[0] = kPrimary * (r.neutral - targets.neutral);
    f[1] = kPrimary * (r.corner - targets.corner);
    f[2] = kPrimary * (r.grid_mean - targets.grid_mean);
    f[3] = w * (r.yaw_zero - targets.yaw_zero);
    f[4] = w * (r.yaw_extreme - targets.yaw_extreme);
    f[5] = w * (r.pitch_up - targets.pitch_up);
    f[6] = w * (r.pitch_down - targets.pitch_down);
    return 0;
  }
};

}  // namespace

OracleConfig calibrate(const OracleConfig& base, const StationaryTargets& targets, CalibrationReport* report) {
  if (!(base.gravity_gain > 0.0) || !(base.yaw_gain > 0.0) || !(base.inertia > 0.0) || !(base.exponent > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "calibrate: gains, inertia and exponent must be positive");
  }
  Eigen::VectorXd u(4);
  u << logit(0.1 / kBaselineMax), logit(15.0 / kOffsetMax), std::log(0.5), std::log(0.3);
  CalibrationFunctor functor(base, targets);
  Eigen::NumericalDiff<CalibrationFunctor, Eigen::Central> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<CalibrationFunctor, Eigen::Central>> lm(diff);
  lm.setMaxfev(2000);
  lm.setXtol(1e-12);
  lm.setFtol(1e-12);
  lm.minimize(u);

  OracleConfig cfg = apply(base, u);
  cfg.calibrated = true;
  CalibrationReport r = stationary_summary(cfg, targets);
  r.iterations = static_cast<std::size_t>(lm.iterations());
  r.max_primary_residual = std::max({std::abs(r.neutral - targets.neutral), std::abs(r.corner - targets.corner),
                                     std::abs(r.grid_mean - targets.grid_mean)});
  if (report) *report = r;
  if (!(r.max_primary_residual <= targets.tolerance)) {
    throw Error(ErrorCode::CalibrationFailure,
                fmt::format("calibrate: primary residual {:.4f} exceeds {:.4f}", r.max_primary_residual,
                            targets.tolerance));
  }
  return cfg;
}

// ------------------------------------------------------------------ movement

traj::ProfilePair movement_profile(const OracleConfig& cfg, kin::HeadPose start, kin::HeadPose end, Rng& rng) {
  const kin::HeadPose delta = end - start;
  traj::ProfilePair pair;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double d = axis == 0 ? delta.pitch : delta.yaw;
    const double jitter = rng.uniform(-1.0, 1.0) * cfg.sigma_jitter;
    auto& g = pair[axis];
    if (d == 0.0) {
      g = {0.0, 0.0, traj::kDefaultWidth, true};
      continue;
    }
    const double mag = std::abs(d);
    const double vmax = axis == 0 ? cfg.max_velocity_pitch : cfg.max_velocity_yaw;
    const double amax = axis == 0 ? cfg.max_accel_pitch : cfg.max_accel_yaw;
    const double root2pi = std::sqrt(2.0 * std::numbers::pi);
    // Peak |omega| = |d| / (sigma sqrt(2 pi)); peak |alpha| = that * e^-1/2 / sigma.
    const double floor_v = mag / (root2pi * vmax * cfg.accel_headroom);
    const double floor_a = std::sqrt(mag * std::exp(-0.5) / (root2pi * amax * cfg.accel_headroom));
    const double sigma = std::max({(cfg.sigma0 + cfg.sigma_slope * mag) * (1.0 + jitter), floor_v, floor_a});
    g.width = sigma;
    g.center = 3.0 * sigma;
    g.amplitude = d / (sigma * root2pi);
  }
  return pair;
}

Movement gen_movement(const OracleConfig& cfg, kin::HeadPose start, kin::HeadPose end, Rng& rng) {
  Movement m;
  m.profile = movement_profile(cfg, start, end, rng);
  m.trajectory.sample_rate = kin::kModelRate;
  if (start == end) {
    m.trajectory.poses = {start};
    return m;
  }
  const double te = traj::end_time(m.profile, start, end);
  const auto k = static_cast<std::size_t>(std::ceil(te * kin::kModelRate - 1e-9));
  const std::size_t n = std::max<std::size_t>(k, 1) + 1;
  const double dt = 1.0 / kin::kModelRate;
  const kin::HeadPose delta = end - start;
  const double a = cfg.noise_smoothing;
  const double innovation = std::sqrt(1.0 - a * a);

  std::array<std::vector<double>, 2> pos;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double d = axis == 0 ? delta.pitch : delta.yaw;
    const double s0 = axis == 0 ? start.pitch : start.yaw;
    std::vector<double> v(n, 0.0);
    double z = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) z = a * z + innovation * rng.normal();
      if (d == 0.0) continue;
      traj::GaussianProfile shape = m.profile[axis];
      shape.amplitude = 1.0;
      v[i] = m.profile[axis].amplitude * shape.velocity(static_cast<double>(i) * dt) *
             (1.0 + cfg.velocity_noise * z);
    }
    traj::rescale_to_endpoint(v, d, dt);
    pos[axis] = traj::cumulative(v, s0, dt);
    pos[axis].back() = axis == 0 ? end.pitch : end.yaw;
  }
  m.trajectory.poses.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.trajectory.poses[i] = {pos[0][i], pos[1][i]};
  return m;
}

// ----------------------------------------------------------------------- EMG

EmgChannelModel draw_channel_model(const OracleConfig& cfg, Rng& rng) {
  EmgChannelModel m;
  const double lg0 = std::log(cfg.gain_min), lg1 = std::log(cfg.gain_max);
  for (std::size_t c = 0; c < emg::kChannels; ++c) {
    m.gain[c] = std::exp(rng.uniform(lg0, lg1));
    m.drift_hz[c] = rng.uniform(0.05, cfg.drift_max_hz);
    m.drift_phase[c] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.drift_amplitude[c] = cfg.drift_amplitude * rng.uniform(0.5, 1.0);
  }
  return m;
}

emg::RawEmgRecord gen_emg(const OracleConfig& cfg, const emg::MclSequence& mcl,
                          const std::vector<double>& yaw_velocity, const EmgChannelModel& model, Rng& rng) {
  if (mcl.values.empty()) throw Error(ErrorCode::InvalidInput, "gen_emg: empty MCL sequence");
  if (!yaw_velocity.empty() && yaw_velocity.size() != mcl.size()) {
    throw Error(ErrorCode::Shape, "gen_emg: yaw velocity length differs from MCL length");
  }
  const double ratio = emg::kRawRate / mcl.sample_rate;
  const auto per_block = static_cast<std::size_t>(std::llround(ratio));
  const std::size_t n = mcl.size() * per_block;
  const double last = static_cast<double>(mcl.size() - 1);
  // Raw sample j represents 20 Hz position (j - (per_block - 1) / 2) / per_block,
  // so block averages line up with the source samples.
  const double offset = 0.5 * static_cast<double>(per_block - 1);
  const auto interp = [&](const std::vector<double>& v, std::size_t j) {
    const double u = std::clamp((static_cast<double>(j) - offset) / ratio, 0.0, last);
    const auto i0 = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i0);
    return i0 + 1 < v.size() ? v[i0] + f * (v[i0 + 1] - v[i0]) : v[i0];
  };

  const iir::Sos band = iir::butterworth_bandpass(4, 20.0, 450.0, emg::kRawRate);
  emg::RawEmgRecord rec;
  rec.sample_rate = emg::kRawRate;
  for (std::size_t c = 0; c < emg::kChannels; ++c) {
    std::vector<double> white(n);
    for (double& w : white) w = rng.normal();
    std::vector<double> carrier = iir::filter(band, white);
    double ss = 0.0;
    for (double x : carrier) ss += x * x;
    const double rms = std::sqrt(ss / static_cast<double>(n));
    if (rms > 0.0) {
      for (double& x : carrier) x /= rms;
    }
    rec.channels[c] = std::move(carrier);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double act = interp(mcl.values, j);
    const double lat = yaw_velocity.empty() ? 0.0 : std::clamp(interp(yaw_velocity, j) / cfg.lateral_velocity, -1.0, 1.0);
    // Leftward yaw (lat < 0) loads the right SCM and the left SC.
    const std::array<double, emg::kChannels> share{0.25 * (1.0 + 0.5 * lat), 0.25 * (1.0 - 0.5 * lat),
                                                   0.25 * (1.0 - 0.5 * lat), 0.25 * (1.0 + 0.5 * lat)};
    const double t = static_cast<double>(j) / emg::kRawRate;
    for (std::size_t c = 0; c < emg::kChannels; ++c) {
      const double drift = model.drift_amplitude[c] *
                           std::sin(2.0 * std::numbers::pi * model.drift_hz[c] * t + model.drift_phase[c]);
      rec.channels[c][j] = model.gain[c] * cfg.emg_scale * 4.0 * share[c] * act * rec.channels[c][j] + drift;
    }
  }
  return rec;
}

// ------------------------------------------------------------------- dataset

const char* to_string(Protocol p) { return p == Protocol::Pilot ? "pilot" : "eval"; }

Protocol parse_protocol(const std::string& text) {
  if (text == "pilot") return Protocol::Pilot;
  if (text == "eval") return Protocol::Eval;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown protocol '{}' (expected pilot or eval)", text));
}

std::vector<kin::HeadPose> anchors(Protocol p) {
  std::vector<kin::HeadPose> out;
  if (p == Protocol::Pilot) {
    for (double pitch : {-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0}) {
      for (double yaw : {-50.0, -40.0, -30.0, -20.0, 0.0, 20.0, 30.0, 40.0, 50.0}) out.push_back({pitch, yaw});
    }
  } else {
    for (double pitch : {-25.0, -5.0, 5.0, 25.0}) {
      for (double yaw : {-45.0, -15.0, 15.0, 45.0}) out.push_back({pitch, yaw});
    }
  }
  return out;
}

std::vector<kin::HeadPose> target_offsets() {
  std::vector<kin::HeadPose> out;
  for (double dp : {-35.0, 0.0, 35.0}) {
    for (double dy : {-25.0, 0.0, 25.0}) {
      if (dp != 0.0 || dy != 0.0) out.push_back({dp, dy});
    }
  }
  return out;
}

Session gen_session(const OracleConfig& cfg, kin::HeadPose anchor, kin::HeadPose target, std::uint64_t seed,
                    bool with_emg) {
  Session s;
  s.anchor = anchor;
  s.target = target;
  s.seed = seed;
  Rng motion_rng(derive_seed(seed, "movement"));
  const Movement m = gen_movement(cfg, anchor, target, motion_rng);
  s.profile = m.profile;

  const auto stationary = static_cast<std::size_t>(std::llround(cfg.stationary_s * kin::kModelRate));
  const auto hold = static_cast<std::size_t>(std::llround(cfg.hold_s * kin::kModelRate));
  s.trajectory.sample_rate = kin::kModelRate;
  s.trajectory.poses.assign(std::max<std::size_t>(stationary, 1), anchor);
  s.move_begin = s.trajectory.size() - 1;
  s.trajectory.poses.insert(s.trajectory.poses.end(), m.trajectory.poses.begin() + 1, m.trajectory.poses.end());
  s.move_end = s.trajectory.size() - 1;
  s.trajectory.poses.insert(s.trajectory.poses.end(), hold, target);
  s.mcl = oracle_sequence(cfg, s.trajectory);

  if (with_emg) {
    const auto kin = kin::differentiate(s.trajectory);
    std::vector<double> yaw_v(kin.size());
    for (std::size_t i = 0; i < kin.size(); ++i) yaw_v[i] = kin.velocity[i].yaw;
    Rng channel_rng(derive_seed(seed, "channels"));
    Rng emg_rng(derive_seed(seed, "emg"));
    s.emg = gen_emg(cfg, s.mcl, yaw_v, draw_channel_model(cfg, channel_rng), emg_rng);
  }
  return s;
}

SyntheticDataset gen_dataset(const OracleConfig& cfg, Protocol protocol, std::uint64_t seed,
                             const GenOptions& options) {
  if (!cfg.calibrated) throw Error(ErrorCode::State, "gen_dataset: oracle config is not calibrated");
  SyntheticDataset ds;
  ds.protocol = protocol;
  ds.seed = seed;
  ds.anchors = anchors(protocol);
  const std::size_t participants =
      options.participants > 0 ? options.participants
                               : (protocol == Protocol::Pilot ? cfg.participants_pilot : cfg.participants_eval);
  const auto offsets = target_offsets();
  const std::uint64_t protocol_seed = derive_seed(seed, to_string(protocol));
  for (std::size_t p = 0; p < participants; ++p) {
    Rng channel_rng(derive_seed(protocol_seed, "participant.channels", p));
    const EmgChannelModel participant_channels = draw_channel_model(cfg, channel_rng);
    for (std::size_t a = 0; a < ds.anchors.size(); ++a) {
      for (std::size_t t = 0; t < offsets.size(); ++t) {
        const kin::HeadPose target = ds.anchors[a] + offsets[t];
        if (!kin::StudyField::contains(target, 0.0)) continue;
        const std::uint64_t sseed =
            derive_seed(protocol_seed, "session", (p * ds.anchors.size() + a) * offsets.size() + t);
        Session s = gen_session(cfg, ds.anchors[a], target, sseed, false);
        s.id = fmt::format("p{:02}_a{:02}_t{}", p, a, t);
        s.participant = p;
        s.anchor_index = a;
        if (options.with_emg) {
          const auto kin = kin::differentiate(s.trajectory);
          std::vector<double> yaw_v(kin.size());
          for (std::size_t i = 0; i < kin.size(); ++i) yaw_v[i] = kin.velocity[i].yaw;
          EmgChannelModel model = participant_channels;
          Rng drift_rng(derive_seed(sseed, "drift"));
          const EmgChannelModel drift = draw_channel_model(cfg, drift_rng);
          model.drift_hz = drift.drift_hz;
          model.drift_phase = drift.drift_phase;
          model.drift_amplitude = drift.drift_amplitude;
          Rng emg_rng(derive_seed(sseed, "emg"));
          s.emg = gen_emg(cfg, s.mcl, yaw_v, model, emg_rng);
        }
        ds.sessions.push_back(std::move(s));
      }
    }
  }
  return ds;
}

std::string config_hash(const OracleConfig& c) {
  const std::string text = fmt::format(
      "{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", c.inertia,
      c.gravity_gain, c.pitch_offset, c.yaw_gain, c.weight_pitch, c.weight_yaw, c.baseline, c.cap, c.exponent,
      c.sigma0, c.sigma_slope, c.sigma_jitter, c.velocity_noise, c.noise_smoothing, c.max_velocity_pitch,
      c.max_velocity_yaw, c.max_accel_pitch, c.max_accel_yaw, c.accel_headroom, c.emg_scale, c.drift_amplitude,
      c.drift_max_hz, c.gain_min, c.gain_max, c.lateral_velocity, c.stationary_s, c.hold_s, c.participants_pilot,
      c.participants_eval, c.calibrated, "v1");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace neckmcl::oracle

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neckmcl/kinematics.hpp"
#include "neckmcl/oracle.hpp"
#include "support.hpp"

using namespace neckmcl;
using kin::HeadPose;
using testsupport::error_code_of;
using testsupport::make_trajectory;

TEST_CASE("resample: constant 90 Hz second becomes 20 constant samples") {
  const auto src = make_trajectory(90.0, 90, [](double) { return HeadPose{0.0, 0.0}; });
  const auto out = kin::resample(src, 20.0);
  CHECK(out.sample_rate == 20.0);
  REQUIRE(out.size() == 20);
  for (const auto& p : out.poses) CHECK(p == HeadPose{0.0, 0.0});
}

TEST_CASE("resample: linear ramp keeps its midpoint") {
  const auto src = make_trajectory(90.0, 91, [](double t) { return HeadPose{0.0, 10.0 * t}; });
  const auto out = kin::resample(src, 20.0);
  REQUIRE(out.size() == 21);
  CHECK(out.poses[10].yaw == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.poses[i].yaw == doctest::Approx(10.0 * static_cast<double>(i) / 20.0).epsilon(1e-12));
  }
}

TEST_CASE("resample: same rate is the identity and idempotent") {
  const auto src = make_trajectory(20.0, 33, [](double t) { return HeadPose{std::sin(3 * t), t * t}; });
  const auto once = kin::resample(src, 20.0);
  CHECK(once.poses == src.poses);
  const auto down = kin::resample(src, 7.0);
  CHECK(kin::resample(down, 7.0).poses == down.poses);
}

TEST_CASE("resample: too short input is invalid") {
  kin::TimedTrajectory one{90.0, {{1.0, 2.0}}};
  CHECK(error_code_of([&] { kin::resample(one, 20.0); }) == ErrorCode::InvalidInput);
  CHECK(error_code_of([&] { kin::resample(kin::TimedTrajectory{90.0, {}}, 20.0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("differentiate: constant pose has zero derivatives") {
  const auto k = kin::differentiate(make_trajectory(20.0, 10, [](double) { return HeadPose{12.0, -7.0}; }));
  REQUIRE(k.size() == 10);
  for (std::size_t i = 0; i < k.size(); ++i) {
    CHECK(k.velocity[i] == kin::AxisPair{0.0, 0.0});
    CHECK(k.acceleration[i] == kin::AxisPair{0.0, 0.0});
  }
}

TEST_CASE("differentiate: pitch = 10 t gives 10 deg/s and zero acceleration") {
  const auto k = kin::differentiate(make_trajectory(20.0, 12, [](double t) { return HeadPose{10.0 * t, 0.0}; }));
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    CHECK(k.velocity[i].pitch == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(k.acceleration[i].pitch == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
  // One-sided endpoints of a line are exact as well.
  CHECK(k.velocity.front().pitch == doctest::Approx(10.0));
  CHECK(k.velocity.back().pitch == doctest::Approx(10.0));
}

TEST_CASE("differentiate: stencil matches hand-written central differences") {
  const auto traj = make_trajectory(20.0, 9, [](double t) { return HeadPose{t * t * t, std::cos(t)}; });
  const auto k = kin::differentiate(traj);
  const double r = 20.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    CHECK(k.velocity[i].pitch == doctest::Approx((traj.poses[i + 1].pitch - traj.poses[i - 1].pitch) * r / 2));
    CHECK(k.acceleration[i].pitch ==
          doctest::Approx((k.velocity[i + 1].pitch - k.velocity[i - 1].pitch) * r / 2));
  }
  CHECK(k.velocity[0].pitch == doctest::Approx((traj.poses[1].pitch - traj.poses[0].pitch) * r));
  CHECK(k.velocity[8].pitch == doctest::Approx((traj.poses[8].pitch - traj.poses[7].pitch) * r));
}

TEST_CASE("differentiate: fewer than 3 samples is invalid") {
  CHECK(error_code_of([] { kin::differentiate({20.0, {{0, 0}, {1, 1}}}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("differentiate(resample(x)) converges at second order on a sine") {
  // Closed form: yaw = 20 sin(2 pi 0.5 t), velocity 20 pi cos(pi t).
  const auto src = make_trajectory(1000.0, 2001, [](double t) { return HeadPose{0.0, 20.0 * std::sin(std::numbers::pi * t)}; });
  const auto err_at = [&](double rate) {
    const auto k = kin::differentiate(kin::resample(src, rate));
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < k.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      e = std::max(e, std::abs(k.velocity[i].yaw - 20.0 * std::numbers::pi * std::cos(std::numbers::pi * t)));
    }
    return e;
  };
  const double e20 = err_at(20.0), e40 = err_at(40.0);
  // Leading truncation term of the central difference: A w (w h)^2 / 6.
  const double w = std::numbers::pi, h = 1.0 / 20.0;
  CHECK(e20 <= 20.0 * w * (w * h) * (w * h) / 6.0 * 1.01);
  CHECK(e20 / e40 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("differentiate: Gaussian velocity peak lands within one sample of mu") {
  oracle::OracleConfig cfg;
  cfg.velocity_noise = 0.0;
  Rng rng(3);
  const auto mv = oracle::gen_movement(cfg, {0, 0}, {0, 25}, rng);
  const auto k = kin::differentiate(mv.trajectory);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (std::abs(k.velocity[i].yaw) > std::abs(k.velocity[peak].yaw)) peak = i;
  }
  CHECK(std::abs(static_cast<double>(peak) / 20.0 - mv.profile.yaw.center) <= 1.0 / 20.0 + 1e-12);
}

TEST_CASE("windows: 20 samples give 4 windows covering 2..17") {
  const auto k = kin::differentiate(make_trajectory(20.0, 20, [](double t) { return HeadPose{t, -t}; }));
  const auto w = kin::windows(k);
  REQUIRE(w.windows.size() == 4);
  CHECK(w.covered_begin == 2);
  CHECK(w.covered_end == 18);
  CHECK(w.uncovered == std::vector<std::size_t>{0, 1, 18, 19});
  for (std::size_t j = 0; j < w.windows.size(); ++j) {
    CHECK(w.windows[j].begin == 4 * j);
    CHECK(w.windows[j].center_begin() == 4 * j + 2);
    CHECK(w.windows[j].center_end() - w.windows[j].center_begin() == 4);
    for (std::size_t i = 0; i < kin::kWindowLength; ++i) {
      CHECK(w.windows[j].pose[i] == k.pose[4 * j + i]);
      CHECK(w.windows[j].acceleration[i] == k.acceleration[4 * j + i]);
    }
  }
}

TEST_CASE("windows: minimal and too-short sequences") {
  const auto k8 = kin::differentiate(make_trajectory(20.0, 8, [](double) { return HeadPose{}; }));
  CHECK(kin::windows(k8).windows.size() == 1);
  const auto k7 = kin::differentiate(make_trajectory(20.0, 7, [](double) { return HeadPose{}; }));
  CHECK(error_code_of([&] { kin::windows(k7); }) == ErrorCode::InvalidInput);
}

TEST_CASE("windows: wrong rate is invalid") {
  const auto k = kin::differentiate(make_trajectory(90.0, 40, [](double) { return HeadPose{}; }));
  CHECK(error_code_of([&] { kin::windows(k); }) == ErrorCode::InvalidInput);
}

TEST_CASE("windows: stride-4 centers partition the covered range for many lengths") {
  for (std::size_t n = 8; n < 60; ++n) {
    const auto k = kin::differentiate(make_trajectory(20.0, n, [](double t) { return HeadPose{t, t}; }));
    const auto w = kin::windows(k);
    std::vector<int> hits(n, 0);
    for (const auto& win : w.windows) {
      for (std::size_t i = win.center_begin(); i < win.center_end(); ++i) ++hits[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool covered = i >= w.covered_begin && i < w.covered_end;
      CHECK(hits[i] == (covered ? 1 : 0));
    }
    CHECK(w.uncovered.size() + (w.covered_end - w.covered_begin) == n);
  }
}

TEST_CASE("windows: smaller strides overlap") {
  const auto k = kin::differentiate(make_trajectory(20.0, 20, [](double t) { return HeadPose{t, t}; }));
  CHECK(kin::windows(k, 1).windows.size() == 13);
  CHECK(kin::windows(k, 2).windows.size() == 7);
  CHECK(error_code_of([&] { kin::windows(k, 0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("study field flags without rejecting") {
  CHECK(kin::StudyField::contains({30, 50}));
  CHECK(kin::StudyField::contains({-30, -50}));
  CHECK_FALSE(kin::StudyField::contains({30.5, 0}));
  CHECK_FALSE(kin::StudyField::contains({0, -51}));
  CHECK(kin::is_finite({1, 2}));
  CHECK_FALSE(kin::is_finite({std::nan(""), 0}));
}

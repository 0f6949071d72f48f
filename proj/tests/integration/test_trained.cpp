#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "neckmcl/evaluation.hpp"
#include "neckmcl/workflow.hpp"
#include "support.hpp"

using namespace neckmcl;
using kin::HeadPose;

namespace {

// Trained once on the full pilot split with library defaults, shared by
// every case.
struct Models {
  RunConfig cfg;
  oracle::OracleConfig ocfg;
  oracle::SyntheticDataset pilot, evalset;
  mcl::MclNet mnet;
  trajnet::TrajectoryNet tnet;
};

const Models& models() {
  static const Models m = [] {
    Models out;
    out.cfg.seed = 21;
    out.ocfg = workflow::calibrated_oracle(out.cfg);
    out.cfg.oracle = out.ocfg;
    out.pilot = oracle::gen_dataset(out.ocfg, oracle::Protocol::Pilot, 21);
    oracle::GenOptions ge;
    ge.participants = 1;
    out.evalset = oracle::gen_dataset(out.ocfg, oracle::Protocol::Eval, 22, ge);
    out.mnet = workflow::train_mclnet(out.pilot, out.cfg).net;
    out.tnet = workflow::train_trajnet(out.pilot, out.cfg).net;
    return out;
  }();
  return m;
}

}  // namespace

TEST_CASE("stationary map tracks the oracle") {
  const auto& m = models();
  const std::vector<HeadPose> poses{{0, 0}, {30, 50}, {0, 30}, {0, -30}, {20, 40}, {20, -40}, {-20, 50}, {-20, -50}};
  const auto map = mcl::stationary_mcl_map(m.mnet, poses);
  MESSAGE("MCL(0,0) = ", map[0], ", MCL(30,50) = ", map[1]);
  CHECK(std::abs(map[0] - 0.17) <= 0.05);
  CHECK(map[1] > map[0]);
  for (std::size_t i = 2; i < poses.size(); i += 2) CHECK(std::abs(map[i] - map[i + 1]) <= 0.08);
}

TEST_CASE("constant pose gives a near-constant sequence") {
  const auto& m = models();
  for (const HeadPose p : {HeadPose{0, 0}, HeadPose{25, -40}, HeadPose{-30, 10}}) {
    const auto traj = testsupport::make_trajectory(20.0, 40, [&](double) { return p; });
    const auto est = mcl::estimate_sequence(m.mnet, traj);
    const auto [lo, hi] = std::minmax_element(est.mcl.values.begin(), est.mcl.values.end());
    CHECK(*hi - *lo <= 0.05);
  }
}

TEST_CASE("stride 2 and stride 4 agree per sample") {
  const auto& m = models();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.evalset.sessions.size(); i += 7) {
    const auto& traj = m.evalset.sessions[i].trajectory;
    const auto a = mcl::estimate_sequence(m.mnet, traj, 2);
    const auto b = mcl::estimate_sequence(m.mnet, traj, 4);
    worst = std::max(worst, testsupport::max_abs_diff(a.mcl.values, b.mcl.values));
  }
  MESSAGE("max |stride2 - stride4| = ", worst);
  CHECK(worst <= 0.02);
}

TEST_CASE("cumulative MCL: zero for no movement, grows with amplitude, trapezoid over the forecast") {
  const auto& m = models();
  CHECK(trajnet::cumulative_mcl({0, 0}, {0, 0}, m.tnet, m.mnet) == 0.0);
  CHECK(trajnet::cumulative_mcl({12, -7}, {12, -7}, m.tnet, m.mnet) == 0.0);
  const double small = trajnet::cumulative_mcl({0, 0}, {0, 10}, m.tnet, m.mnet);
  const double large = trajnet::cumulative_mcl({0, 0}, {0, 50}, m.tnet, m.mnet);
  MESSAGE("H_c 10 deg = ", small, ", 50 deg = ", large);
  CHECK(small > 0.0);
  CHECK(large > small);

  const auto f = trajnet::forecast(m.tnet, m.mnet, {-10, 20}, {15, -30});
  CHECK(f.mcl.size() == f.synthesis.trajectory.size());
  CHECK(std::abs(f.cumulative_mcl - traj::trapezoid(f.mcl, 1.0 / kin::kModelRate)) <= 1e-12);
  CHECK(std::abs(f.synthesis.trajectory.poses.back().yaw + 30.0) <= 1e-6);
}

TEST_CASE("held-out profile parameters within 10% relative error") {
  const auto& m = models();
  const auto ex = workflow::trajnet_examples(m.evalset);
  std::array<std::array<double, 3>, 2> err{};
  std::array<std::size_t, 2> count{};
  for (const auto& e : ex) {
    const auto pred = trajnet::predict_profile(m.tnet, e.start, e.end);
    for (std::size_t a = 0; a < 2; ++a) {
      if (e.profile[a].degenerate) continue;
      err[a][0] += std::abs(pred[a].amplitude - e.profile[a].amplitude) / std::abs(e.profile[a].amplitude);
      err[a][1] += std::abs(pred[a].center - e.profile[a].center) / e.profile[a].center;
      err[a][2] += std::abs(pred[a].width - e.profile[a].width) / e.profile[a].width;
      ++count[a];
    }
  }
  for (std::size_t a = 0; a < 2; ++a) {
    REQUIRE(count[a] > 0);
    for (std::size_t k = 0; k < 3; ++k) {
      const double mean = err[a][k] / static_cast<double>(count[a]);
      MESSAGE("axis ", a, " parameter ", k, " mean relative error ", mean);
      CHECK(mean <= 0.10);
    }
  }
}

TEST_CASE("pre-hoc error is not below post-hoc error on identical data") {
  const auto& m = models();
  const auto post = eval::evaluate_model(m.mnet, nullptr, m.evalset, eval::Mode::PostHoc);
  const auto pre = eval::evaluate_model(m.mnet, &m.tnet, m.evalset, eval::Mode::PreHoc);
  MESSAGE("post-hoc ", post.nrmse.mean, "%, pre-hoc ", pre.nrmse.mean, "%");
  CHECK(post.nrmse.mean <= 15.0);
  CHECK(pre.nrmse.mean <= 20.0);
  CHECK(pre.nrmse.mean >= post.nrmse.mean);
}

TEST_CASE("checkpoint round trip keeps inference bit-identical") {
  const auto& m = models();
  auto mcopy = m.mnet;
  auto tcopy = m.tnet;
  const auto mback = mcl::from_checkpoint(nn::Checkpoint::parse(mcl::to_checkpoint(mcopy).dump()));
  const auto tback = trajnet::from_checkpoint(nn::Checkpoint::parse(trajnet::to_checkpoint(tcopy).dump()));
  const auto& traj = m.evalset.sessions.front().trajectory;
  CHECK(mcl::estimate_sequence(mback, traj).mcl.values == mcl::estimate_sequence(m.mnet, traj).mcl.values);
  CHECK(trajnet::cumulative_mcl({0, 0}, {20, 30}, tback, mback) == trajnet::cumulative_mcl({0, 0}, {20, 30}, m.tnet, m.mnet));
}

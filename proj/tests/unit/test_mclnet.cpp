#include <doctest.h>

#include <cmath>

#include "neckmcl/mclnet.hpp"
#include "neckmcl/nn/gradcheck.hpp"
#include "neckmcl/oracle.hpp"
#include "support.hpp"

using namespace neckmcl;
using kin::HeadPose;
using testsupport::error_code_of;
using testsupport::make_trajectory;

namespace {

mcl::MclNet random_net(std::uint64_t seed) {
  mcl::MclNet net;
  Rng rng(seed);
  net.init(rng);
  // Give the batchnorm buffers non-trivial values with one train pass.
  nn::Tensor warm = nn::random_tensor(16, mcl::kInputChannels, kin::kWindowLength, rng);
  net.forward(warm, nn::Mode::Train);
  net.trained = true;
  return net;
}

kin::TimedTrajectory wobble(std::size_t n) {
  return make_trajectory(20.0, n, [](double t) { return HeadPose{10 * std::sin(2 * t), 30 * std::cos(1.3 * t)}; });
}

}  // namespace

TEST_CASE("output shape and positivity for random inputs") {
  auto net = random_net(1);
  Rng rng(2);
  const auto x = nn::random_tensor(5, 4, 8, rng);
  const auto y = net.infer(x);
  CHECK(y.batch() == 5);
  CHECK(y.channels() == 1);
  CHECK(y.time() == 4);
  for (double v : y.values()) CHECK(v > 0.0);
  CHECK(error_code_of([&] { net.infer(nn::Tensor(1, 3, 8)); }) == ErrorCode::Shape);
  CHECK(error_code_of([&] { net.infer(nn::Tensor(1, 4, 7)); }) == ErrorCode::Shape);
}

TEST_CASE("active torque is I alpha minus the passive torque") {
  auto net = random_net(3);
  net.log_inertia() = std::log(1.7);
  Rng rng(4);
  auto x = nn::random_tensor(3, 4, 8, rng);
  const auto tr = net.trace(x);
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t t = 0; t < 8; ++t) {
        CHECK(tr.active_torque.at(b, c, t) ==
              doctest::Approx(1.7 * x.at(b, 2 + c, t) - tr.passive_torque.at(b, c, t)));
      }
    }
  }
  // Zero acceleration leaves only the passive term.
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t c = 2; c < 4; ++c) {
      for (std::size_t t = 0; t < 8; ++t) x.at(b, c, t) = 0.0;
    }
  }
  const auto still = net.trace(x);
  for (std::size_t i = 0; i < still.active_torque.size(); ++i) {
    CHECK(still.active_torque.values()[i] == -still.passive_torque.values()[i]);
  }
}

TEST_CASE("untrained network refuses inference") {
  mcl::MclNet net;
  Rng rng(1);
  net.init(rng);
  CHECK(error_code_of([&] { mcl::estimate_sequence(net, wobble(20)); }) == ErrorCode::State);
  CHECK(error_code_of([&] { mcl::forward(net, kin::stationary_window({0, 0})); }) == ErrorCode::State);
  const HeadPose pose{0, 0};
  CHECK(error_code_of([&] { mcl::stationary_mcl_map(net, {&pose, 1}); }) == ErrorCode::State);
}

TEST_CASE("non-finite window is invalid input") {
  auto net = random_net(5);
  auto w = kin::stationary_window({0, 0});
  w.pose[3].yaw = std::nan("");
  CHECK(error_code_of([&] { mcl::forward(net, w); }) == ErrorCode::InvalidInput);
}

TEST_CASE("estimate_sequence: stride 4 stitches window centers and fills the edges") {
  auto net = random_net(6);
  const auto traj = wobble(20);
  const auto est = mcl::estimate_sequence(net, traj);
  REQUIRE(est.mcl.size() == 20);
  CHECK(est.mcl.sample_rate == 20.0);
  const auto ws = kin::windows(kin::differentiate(traj));
  for (const auto& w : ws.windows) {
    const auto out = mcl::forward(net, w);
    for (std::size_t j = 0; j < 4; ++j) CHECK(est.mcl.values[w.center_begin() + j] == doctest::Approx(out[j]).epsilon(1e-12));
  }
  CHECK(est.filled == std::vector<bool>{true, true, false, false, false, false, false, false, false, false,
                                        false, false, false, false, false, false, false, false, true, true});
  CHECK(est.mcl.values[0] == est.mcl.values[2]);
  CHECK(est.mcl.values[1] == est.mcl.values[2]);
  CHECK(est.mcl.values[18] == est.mcl.values[17]);
  CHECK(est.mcl.values[19] == est.mcl.values[17]);
}

TEST_CASE("estimate_sequence: stride 1 averages overlapping centers") {
  auto net = random_net(7);
  const auto traj = wobble(14);
  const auto est = mcl::estimate_sequence(net, traj, 1);
  const auto ws = kin::windows(kin::differentiate(traj), 1);
  std::vector<double> sum(14, 0.0), count(14, 0.0);
  for (const auto& w : ws.windows) {
    const auto out = mcl::forward(net, w);
    for (std::size_t j = 0; j < 4; ++j) {
      sum[w.center_begin() + j] += out[j];
      count[w.center_begin() + j] += 1.0;
    }
  }
  for (std::size_t i = 2; i < 12; ++i) CHECK(est.mcl.values[i] == doctest::Approx(sum[i] / count[i]).epsilon(1e-12));
  CHECK(count[2] == 1.0);
  CHECK(count[5] == 4.0);
}

TEST_CASE("estimate_sequence: rate and length errors") {
  auto net = random_net(8);
  CHECK(error_code_of([&] { mcl::estimate_sequence(net, wobble(7)); }) == ErrorCode::InvalidInput);
  auto fast = make_trajectory(90.0, 90, [](double) { return HeadPose{}; });
  CHECK(error_code_of([&] { mcl::estimate_sequence(net, fast); }) == ErrorCode::InvalidInput);
}

TEST_CASE("make_samples: targets at window centers and shifted targets") {
  const auto traj = wobble(20);
  emg::MclSequence m{20.0, std::vector<double>(20)};
  for (std::size_t i = 0; i < 20; ++i) m.values[i] = static_cast<double>(i);
  const auto s = mcl::make_samples(traj, m);
  REQUIRE(s.size() == 4);
  CHECK(s[1].target == std::array<double, 4>{6, 7, 8, 9});
  const auto later = mcl::make_samples(traj, m, 4, 2);
  REQUIRE(later.size() == 4);
  CHECK(later[0].target == std::array<double, 4>{4, 5, 6, 7});
  // Shifting by -3 drops the first window.
  const auto earlier = mcl::make_samples(traj, m, 4, -3);
  REQUIRE(earlier.size() == 3);
  CHECK(earlier[0].window.begin == 4);
  CHECK(earlier[0].target == std::array<double, 4>{3, 4, 5, 6});
  // Phase 3: windows begin at 3, 7, 11 (15 would overrun 20 samples).
  const auto phased = mcl::make_samples(traj, m, 4, 0, 3);
  REQUIRE(phased.size() == 3);
  CHECK(phased[0].window.begin == 3);
  CHECK(phased[2].target == std::array<double, 4>{13, 14, 15, 16});
  CHECK(mcl::make_samples(traj, m, 4, 0, 7).front().window.begin == 3);
  emg::MclSequence short_m{20.0, std::vector<double>(19)};
  CHECK(error_code_of([&] { mcl::make_samples(traj, short_m); }) == ErrorCode::Shape);
  CHECK(error_code_of([&] { mcl::make_samples(traj, m, 0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("fit_stats: pose standardised, acceleration scaled only") {
  const auto traj = wobble(40);
  emg::MclSequence m{20.0, std::vector<double>(40, 0.3)};
  const auto samples = mcl::make_samples(traj, m);
  const auto st = mcl::fit_stats(samples);
  CHECK(st.pose_std[0] > 0.0);
  CHECK(st.accel_std[1] > 0.0);
  const auto x = mcl::make_input({&samples[0].window, 1}, st);
  CHECK(x.at(0, 2, 0) == doctest::Approx(samples[0].window.acceleration[0].pitch / st.accel_std[0]));
  CHECK(error_code_of([] { mcl::fit_stats({}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("training memorises a handful of oracle sessions and round-trips") {
  const auto cfg = oracle::calibrate();
  std::vector<mcl::TrainingSample> samples;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto s = oracle::gen_session(cfg, {10.0 * static_cast<double>(k) - 15, -20}, {5, 25}, 100 + k, false);
    const auto add = mcl::make_samples(s.trajectory, s.mcl, 1);
    samples.insert(samples.end(), add.begin(), add.end());
  }
  mcl::TrainConfig tc;
  tc.epochs = 60;
  tc.learning_rate = 1e-2;
  tc.lr_drop_epoch = 45;
  tc.batch_size = 16;
  tc.weight_decay = 0.0;
  tc.seed = 3;
  auto result = mcl::train(samples, tc);
  CHECK(result.net.trained);
  REQUIRE(result.loss_history.size() == 60);
  CHECK(result.loss_history.back() < 0.1 * result.loss_history.front());
  CHECK(result.loss_history.back() < 1e-3);

  const auto again = mcl::train(samples, tc);
  CHECK(again.loss_history == result.loss_history);

  const auto ck = mcl::to_checkpoint(result.net);
  const auto back = mcl::from_checkpoint(nn::Checkpoint::parse(ck.dump()));
  const auto traj = wobble(24);
  CHECK(mcl::estimate_sequence(back, traj).mcl.values == mcl::estimate_sequence(result.net, traj).mcl.values);
  CHECK(back.inertia() == result.net.inertia());

  auto wrong = ck;
  wrong.kind = "trajnet";
  CHECK(error_code_of([&] { mcl::from_checkpoint(wrong); }) == ErrorCode::Parse);
}

TEST_CASE("empty training set is invalid") {
  CHECK(error_code_of([] { mcl::train({}, {}); }) == ErrorCode::InvalidInput);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "neckmcl/evaluation.hpp"
#include "neckmcl/metrics.hpp"
#include "support.hpp"

using namespace neckmcl;
using namespace neckmcl::metrics;
using testsupport::error_code_of;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Direct O(n^2) rank definition: 1 + (#smaller) + (#equal - 1) / 2.
std::vector<double> brute_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      less += y < x[i];
      equal += y == x[i];
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

}  // namespace

TEST_CASE("nrmse and nmae hand examples") {
  const std::vector<double> m{0, 1}, swapped{1, 0}, half{0.5, 0.5};
  CHECK(nrmse(m, m) == 0.0);
  CHECK(nrmse(swapped, m) == doctest::Approx(100.0));
  CHECK(nrmse(std::vector<double>{0.1, 1.1, 2.1}, std::vector<double>{0, 1, 2}) == doctest::Approx(5.0));
  CHECK(nmae(m, m) == 0.0);
  CHECK(nmae(half, m) == doctest::Approx(50.0));
  // Mean normaliser: mean |measured| = 0.5.
  CHECK(nmae(half, m, Normalizer::Mean) == doctest::Approx(100.0));
  CHECK(nrmse(swapped, m, Normalizer::Mean) == doctest::Approx(200.0));
}

TEST_CASE("nrmse and nmae errors") {
  const std::vector<double> flat{0.3, 0.3, 0.3}, any{0, 1, 2};
  CHECK(error_code_of([&] { nrmse(any, flat); }) == ErrorCode::DegenerateRange);
  CHECK(error_code_of([&] { nmae(any, flat); }) == ErrorCode::DegenerateRange);
  CHECK(error_code_of([&] { nrmse(any, std::vector<double>{1, 2}); }) == ErrorCode::Shape);
  CHECK(error_code_of([] { nrmse(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorCode::InvalidInput);
  CHECK(error_code_of([&] { nmae(any, std::vector<double>{0, 0, 0}, Normalizer::Mean); }) == ErrorCode::DegenerateRange);
  CHECK(parse_normalizer("mean") == Normalizer::Mean);
  CHECK(error_code_of([] { parse_normalizer("std"); }) == ErrorCode::Config);
}

TEST_CASE("nmae never exceeds nrmse; both are non-negative") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + rng.below(40);
    const auto p = random_vector(rng, n), m = random_vector(rng, n);
    CHECK(nmae(p, m) >= 0.0);
    CHECK(nmae(p, m) <= nrmse(p, m) * (1 + 1e-12));
  }
}

TEST_CASE("translation and positive scaling leave the normalised errors unchanged") {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + rng.below(30);
    const auto p = random_vector(rng, n), m = random_vector(rng, n);
    const double shift = rng.uniform(-5, 5), scale = rng.uniform(0.1, 10);
    std::vector<double> ps(n), ms(n), pc(n), mc(n);
    for (std::size_t i = 0; i < n; ++i) {
      ps[i] = p[i] + shift;
      ms[i] = m[i] + shift;
      pc[i] = p[i] * scale;
      mc[i] = m[i] * scale;
    }
    CHECK(nrmse(ps, ms) == doctest::Approx(nrmse(p, m)).epsilon(1e-9));
    CHECK(nmae(ps, ms) == doctest::Approx(nmae(p, m)).epsilon(1e-9));
    CHECK(nrmse(pc, mc) == doctest::Approx(nrmse(p, m)).epsilon(1e-9));
    CHECK(nmae(pc, mc) == doctest::Approx(nmae(p, m)).epsilon(1e-9));
  }
}

TEST_CASE("pearson and spearman hand examples") {
  const std::vector<double> x{-2, -1, 0, 1, 2};
  std::vector<double> lin(5), cube(5);
  for (std::size_t i = 0; i < 5; ++i) {
    lin[i] = 2 * x[i] + 1;
    cube[i] = x[i] * x[i] * x[i];
  }
  CHECK(pearson(x, lin) == doctest::Approx(1.0));
  CHECK(spearman(x, lin) == doctest::Approx(1.0));
  CHECK(spearman(x, cube) == doctest::Approx(1.0));
  CHECK(pearson(x, cube) < 1.0);
  // 34 / sqrt(10 * 130)
  CHECK(pearson(x, cube) == doctest::Approx(34.0 / std::sqrt(1300.0)));
  const std::vector<double> ties{1, 2, 2, 3};
  CHECK(spearman(ties, ties) == doctest::Approx(1.0));
  CHECK(average_ranks(ties) == std::vector<double>{1, 2.5, 2.5, 4});
  std::vector<double> neg(5);
  for (std::size_t i = 0; i < 5; ++i) neg[i] = -lin[i];
  CHECK(pearson(x, neg) == doctest::Approx(-1.0));
}

TEST_CASE("correlation errors") {
  const std::vector<double> flat{1, 1, 1}, x{1, 2, 3};
  CHECK(error_code_of([&] { pearson(flat, x); }) == ErrorCode::DegenerateVariance);
  CHECK(error_code_of([&] { spearman(x, flat); }) == ErrorCode::DegenerateVariance);
  CHECK(error_code_of([] { pearson(std::vector<double>{1}, std::vector<double>{2}); }) == ErrorCode::InvalidInput);
  CHECK(error_code_of([&] { pearson(x, std::vector<double>{1, 2}); }) == ErrorCode::Shape);
}

TEST_CASE("average ranks match the brute-force definition") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> v(1 + rng.below(30));
    for (auto& x : v) x = static_cast<double>(rng.below(6));
    CHECK(average_ranks(v) == brute_ranks(v));
  }
}

TEST_CASE("spearman is invariant under strictly monotone transforms; correlations bounded") {
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + rng.below(30);
    const auto x = random_vector(rng, n, 0.1, 3.0), y = random_vector(rng, n, 0.1, 3.0);
    std::vector<double> fx(n), gy(n);
    for (std::size_t i = 0; i < n; ++i) {
      fx[i] = std::exp(2 * x[i]);
      gy[i] = -1.0 / y[i];
    }
    CHECK(spearman(fx, gy) == doctest::Approx(spearman(x, y)).epsilon(1e-12));
    const double r = pearson(x, y);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto ms = mean_std(v);
  CHECK(ms.mean == 5.0);
  CHECK(ms.std == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(ms.count == 8);
  CHECK(mean_std(std::vector<double>{3.0}).std == 0.0);
}

TEST_CASE("evaluation refuses the training split and a missing trajectory model") {
  const auto cfg = oracle::calibrate();
  oracle::GenOptions opt;
  opt.participants = 1;
  const auto pilot = oracle::gen_dataset(cfg, oracle::Protocol::Pilot, 1, opt);
  const auto evalset = oracle::gen_dataset(cfg, oracle::Protocol::Eval, 1, opt);
  mcl::MclNet net;
  Rng rng(1);
  net.init(rng);
  net.trained = true;
  CHECK(error_code_of([&] { eval::evaluate_model(net, nullptr, pilot, eval::Mode::PostHoc); }) == ErrorCode::InvalidInput);
  CHECK(error_code_of([&] { eval::evaluate_model(net, nullptr, evalset, eval::Mode::PreHoc); }) == ErrorCode::InvalidInput);
  CHECK(eval::parse_mode("prehoc") == eval::Mode::PreHoc);
  CHECK(error_code_of([] { eval::parse_mode("both"); }) == ErrorCode::InvalidInput);

  // An untrained-looking but flagged network still produces a well-formed report.
  eval::EvalOptions o;
  o.allow_train_split = true;
  const auto rep = eval::evaluate_model(net, nullptr, pilot, eval::Mode::PostHoc, o);
  CHECK(rep.groups.size() == 63);
  CHECK(rep.subject_nrmse.size() == 1);
  std::size_t total = 0;
  for (const auto& g : rep.groups) {
    total += g.samples;
    CHECK(g.nrmse >= 0.0);
    CHECK(g.nmae <= g.nrmse * (1 + 1e-12));
    CHECK(std::abs(g.pearson) <= 1.0);
  }
  CHECK(total == rep.samples);
  std::ostringstream csv;
  eval::write_plot_csv(csv, rep);
  CHECK(csv.str().rfind("anchor,metric,value\n", 0) == 0);
  const auto doc = nlohmann::json::parse(eval::to_json(rep));
  CHECK(doc.at("mode") == "posthoc");
  CHECK(doc.at("groups").size() == 63);
  CHECK(doc.at("nrmse_percent").at("mean").get<double>() == doctest::Approx(rep.nrmse.mean));
}

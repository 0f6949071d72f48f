#include "neckmcl/selftest.hpp"

#include <cmath>
#include <functional>
#include <span>

#include <fmt/format.h>

#include "neckmcl/error.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/metrics.hpp"
#include "neckmcl/nn/gradcheck.hpp"
#include "neckmcl/nn/sequential.hpp"
#include "neckmcl/trajnet.hpp"

namespace neckmcl {

namespace {

template <class Net>
CheckResult run_check(const std::string& name, Net& net, const nn::Tensor& x, Rng& rng, double tolerance) {
  const auto report = nn::check_gradients(net, x, rng);
  return {name, report.passed(tolerance),
          fmt::format("max_rel_error={:.3e} worst={} entries={}", report.max_rel_error, report.worst,
                      report.entries)};
}

CheckResult single_layer(const std::string& name, nn::Layer layer, std::size_t batch, std::size_t channels,
                         std::size_t time, Rng& rng, double tolerance) {
  nn::Sequential net({std::move(layer)});
  net.init(rng);
  const nn::Tensor x = nn::random_tensor(batch, channels, time, rng);
  return run_check(name, net, x, rng, tolerance);
}

CheckResult expect_near(const std::string& name, double got, double want) {
  const bool ok = std::abs(got - want) <= 1e-9;
  return {name, ok, fmt::format("got={:.12g} want={:.12g}", got, want)};
}

CheckResult expect_true(const std::string& name, bool ok, const std::string& detail) { return {name, ok, detail}; }

template <class F>
CheckResult expect_error(const std::string& name, ErrorCode code, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return {name, e.code() == code, fmt::format("code={}", to_string(e.code()))};
  }
  return {name, false, "no error raised"};
}

}  // namespace

std::vector<CheckResult> gradient_checks(std::uint64_t seed, double tolerance) {
  Rng rng(derive_seed(seed, "selftest.gradients"));
  std::vector<CheckResult> out;
  out.push_back(single_layer("fully_connected", nn::FullyConnected(3, 4), 4, 3, 2, rng, tolerance));
  out.push_back(single_layer("conv1d", nn::Conv1D(3, 4, 3), 3, 3, 8, rng, tolerance));
  out.push_back(single_layer("batchnorm1d", nn::BatchNorm1D(3), 4, 3, 5, rng, tolerance));
  out.push_back(single_layer("relu", nn::ReLU(), 2, 3, 5, rng, tolerance));
  out.push_back(single_layer("maxpool1d", nn::MaxPool1D(2, 2), 2, 3, 8, rng, tolerance));
  out.push_back(single_layer("softplus", nn::Softplus(), 2, 3, 5, rng, tolerance));

  mcl::MclNet mnet;
  mnet.init(rng);
  const nn::Tensor mx = nn::random_tensor(6, mcl::kInputChannels, kin::kWindowLength, rng);
  out.push_back(run_check("mclnet", mnet, mx, rng, tolerance));

  trajnet::TrajectoryNet tnet;
  tnet.init(rng);
  const nn::Tensor tx = nn::random_tensor(8, trajnet::kInputs, 1, rng);
  out.push_back(run_check("trajectorynet", tnet, tx, rng, tolerance));
  return out;
}

std::vector<CheckResult> metric_examples() {
  using std::vector;
  std::vector<CheckResult> out;
  const vector<double> same{0.3, 0.1, 0.7, 0.2};
  out.push_back(expect_near("nrmse_identical", metrics::nrmse(same, same), 0.0));
  out.push_back(expect_near("nrmse_swapped", metrics::nrmse(vector<double>{1, 0}, vector<double>{0, 1}), 100.0));
  out.push_back(expect_near("nrmse_offset",
                            metrics::nrmse(vector<double>{0.1, 1.1, 2.1}, vector<double>{0, 1, 2}), 5.0));
  out.push_back(expect_near("nmae_identical", metrics::nmae(same, same), 0.0));
  out.push_back(expect_near("nmae_flat", metrics::nmae(vector<double>{0.5, 0.5}, vector<double>{0, 1}), 50.0));
  {
    const vector<double> p{0.2, 0.9, 0.4, 0.0, 0.6};
    const vector<double> m{0.1, 0.5, 0.8, 0.3, 0.3};
    const double a = metrics::nmae(p, m);
    const double r = metrics::nrmse(p, m);
    out.push_back(expect_true("nmae_le_nrmse", a <= r, fmt::format("nmae={} nrmse={}", a, r)));
  }
  {
    const vector<double> x{-2, -1, 0, 1, 2, 3.5};
    vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    out.push_back(expect_near("pearson_linear", metrics::pearson(x, y), 1.0));
    out.push_back(expect_near("spearman_linear", metrics::spearman(x, y), 1.0));
  }
  {
    const vector<double> x{-2, -1, 0, 1, 2};
    const vector<double> y{-8, -1, 0, 1, 8};
    const double r = metrics::pearson(x, y);
    out.push_back(expect_near("spearman_cubic", metrics::spearman(x, y), 1.0));
    out.push_back(expect_true("pearson_cubic_below_one", r < 1.0 - 1e-9, fmt::format("r={}", r)));
  }
  {
    const vector<double> x{1, 2, 2, 3};
    out.push_back(expect_near("spearman_ties", metrics::spearman(x, x), 1.0));
  }
  out.push_back(expect_error("nrmse_zero_range", ErrorCode::DegenerateRange, [] {
    metrics::nrmse(vector<double>{1, 2}, vector<double>{3, 3});
  }));
  out.push_back(expect_error("pearson_zero_variance", ErrorCode::DegenerateVariance, [] {
    metrics::pearson(vector<double>{1, 2, 3}, vector<double>{4, 4, 4});
  }));
  return out;
}

}  // namespace neckmcl

#include "neckmcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "neckmcl/error.hpp"

namespace neckmcl::metrics {

Normalizer parse_normalizer(const std::string& text) {
  if (text == "range") return Normalizer::Range;
  if (text == "mean") return Normalizer::Mean;
  throw Error(ErrorCode::Config, fmt::format("unknown normalizer '{}' (expected range or mean)", text));
}

const char* to_string(Normalizer n) { return n == Normalizer::Range ? "range" : "mean"; }

namespace {

void require_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::Shape, fmt::format("{}: lengths differ ({} vs {})", what, a.size(), b.size()));
  }
  if (a.size() < 2) throw Error(ErrorCode::InvalidInput, fmt::format("{}: need at least 2 samples", what));
}

double normaliser(std::span<const double> measured, Normalizer n, const char* what) {
  double d = 0.0;
  if (n == Normalizer::Range) {
    const auto [lo, hi] = std::minmax_element(measured.begin(), measured.end());
    d = *hi - *lo;
  } else {
    for (double v : measured) d += std::abs(v);
    d /= static_cast<double>(measured.size());
  }
  if (!(d > 0.0)) throw Error(ErrorCode::DegenerateRange, fmt::format("{}: measured signal has zero {}", what, to_string(n)));
  return d;
}

}  // namespace

double nrmse(std::span<const double> predicted, std::span<const double> measured, Normalizer normalizer) {
  require_pair(predicted, measured, "nrmse");
  const double d = normaliser(measured, normalizer, "nrmse");
  double sse = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - measured[i];
    sse += e * e;
  }
  return 100.0 * std::sqrt(sse / static_cast<double>(predicted.size())) / d;
}

double nmae(std::span<const double> predicted, std::span<const double> measured, Normalizer normalizer) {
  require_pair(predicted, measured, "nmae");
  const double d = normaliser(measured, normalizer, "nmae");
  double sae = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sae += std::abs(predicted[i] - measured[i]);
  return 100.0 * (sae / static_cast<double>(predicted.size())) / d;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::DegenerateVariance, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

MeanStd mean_std(std::span<const double> x) {
  MeanStd r;
  r.count = x.size();
  if (x.empty()) return r;
  r.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  if (x.size() < 2) return r;
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(x.size() - 1));
  return r;
}

}  // namespace neckmcl::metrics

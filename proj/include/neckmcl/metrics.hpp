#pragma once

#include <span>
#include <string>
#include <vector>

namespace neckmcl::metrics {

/// Denominator of the normalised errors: the measured signal's range
/// (max - min) or the mean of its absolute values.
enum class Normalizer { Range, Mean };

Normalizer parse_normalizer(const std::string& text);
const char* to_string(Normalizer n);

/// 100 * RMSE / normaliser(measured), in percent.
double nrmse(std::span<const double> predicted, std::span<const double> measured,
             Normalizer normalizer = Normalizer::Range);
/// 100 * MAE / normaliser(measured), in percent.
double nmae(std::span<const double> predicted, std::span<const double> measured,
            Normalizer normalizer = Normalizer::Range);

double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks (ties share their mean rank).
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (n - 1); 0 for n < 2
  std::size_t count = 0;
};
MeanStd mean_std(std::span<const double> x);

}  // namespace neckmcl::metrics

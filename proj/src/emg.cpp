#include "neckmcl/emg.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "neckmcl/error.hpp"
#include "neckmcl/iir.hpp"

namespace neckmcl::emg {

namespace {

void require_nonempty(std::span<const double> x, const char* what) {
  if (x.empty()) throw Error(ErrorCode::InvalidInput, fmt::format("{}: empty channel", what));
}

std::size_t half_window(double window_s, double sample_rate) {
  return static_cast<std::size_t>(std::llround(window_s * sample_rate / 2.0));
}

// Centred moving average of `x` with half-width h, shrinking at the edges.
std::vector<double> moving_mean(std::span<const double> x, std::size_t h) {
  const std::size_t n = x.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= h ? i - h : 0;
    const std::size_t hi = std::min(n, i + h + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

double percentile(std::vector<double> values, double pct) {
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

std::string_view to_string(MuscleRole role) noexcept {
  switch (role) {
    case MuscleRole::LeftScm: return "l_scm";
    case MuscleRole::RightScm: return "r_scm";
    case MuscleRole::LeftSc: return "l_sc";
    case MuscleRole::RightSc: return "r_sc";
  }
  return "?";
}

void RawEmgRecord::validate() const {
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidInput, "emg: sample rate must be positive");
  for (const auto& ch : channels) {
    if (ch.size() != channels[0].size()) {
      throw Error(ErrorCode::InvalidInput, "emg: channels must have equal length");
    }
  }
  if (channels[0].empty()) throw Error(ErrorCode::InvalidInput, "emg: empty record");
}

std::vector<double> detrend(std::span<const double> channel, double sample_rate, double window_s) {
  require_nonempty(channel, "detrend");
  std::vector<double> trend = moving_mean(channel, half_window(window_s, sample_rate));
  std::vector<double> out(channel.size());
  for (std::size_t i = 0; i < channel.size(); ++i) out[i] = channel[i] - trend[i];
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= mean;
  return out;
}

std::vector<double> bandpass(std::span<const double> channel, double sample_rate, double low_hz,
                             double high_hz, int order) {
  require_nonempty(channel, "bandpass");
  const iir::Sos sos = iir::butterworth_bandpass(order, low_hz, high_hz, sample_rate);
  return iir::filtfilt(sos, channel);
}

std::vector<double> rectify_envelope(std::span<const double> channel, double sample_rate,
                                     double window_s) {
  require_nonempty(channel, "rectify_envelope");
  std::vector<double> sq(channel.size());
  for (std::size_t i = 0; i < channel.size(); ++i) {
    const double r = std::abs(channel[i]);
    sq[i] = r * r;
  }
  // Half-width chosen so the full window spans window_s.
  const std::size_t width = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window_s * sample_rate)));
  std::vector<double> out = moving_mean(sq, width / 2);
  for (double& v : out) v = std::sqrt(std::max(v, 0.0));
  return out;
}

std::vector<double> balance_and_integrate(const std::array<std::vector<double>, kChannels>& processed) {
  const std::size_t n = processed[0].size();
  for (const auto& ch : processed) {
    if (ch.size() != n || n == 0) {
      throw Error(ErrorCode::InvalidInput, "balance: channels must be non-empty and equal length");
    }
  }
  auto mean = [](const std::vector<double>& ch) {
    return std::accumulate(ch.begin(), ch.end(), 0.0) / static_cast<double>(ch.size());
  };

  std::vector<double> total(n, 0.0);
  constexpr std::array<std::pair<MuscleRole, MuscleRole>, 2> kPairs{
      std::pair{MuscleRole::LeftScm, MuscleRole::RightScm},
      std::pair{MuscleRole::LeftSc, MuscleRole::RightSc}};
  for (const auto& [left_role, right_role] : kPairs) {
    const auto& left = processed[static_cast<std::size_t>(left_role)];
    const auto& right = processed[static_cast<std::size_t>(right_role)];
    const double left_mean = mean(left);
    const double right_mean = mean(right);
    const bool left_silent = !(left_mean > 0.0);
    const bool right_silent = !(right_mean > 0.0);
    if (left_silent && right_silent) continue;
    if (left_silent || right_silent) {
      throw Error(ErrorCode::DegenerateChannel,
                  fmt::format("balance: channel {} has zero session mean",
                              to_string(left_silent ? left_role : right_role)));
    }
    const double gain = left_mean / right_mean;
    for (std::size_t i = 0; i < n; ++i) total[i] += left[i] + gain * right[i];
  }
  return total;
}

std::vector<double> block_average(std::span<const double> channel, double sample_rate,
                                  double output_rate) {
  const double ratio = sample_rate / output_rate;
  const auto block = static_cast<std::size_t>(std::llround(ratio));
  if (block == 0 || std::abs(ratio - static_cast<double>(block)) > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "block_average: sample rate must be an integer multiple of output rate");
  }
  const std::size_t blocks = channel.size() / block;
  if (blocks == 0) throw Error(ErrorCode::InvalidInput, "block_average: record shorter than one block");
  std::vector<double> out(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < block; ++j) acc += channel[b * block + j];
    out[b] = acc / static_cast<double>(block);
  }
  return out;
}

SessionStats session_stats(std::span<const double> downsampled, const PipelineConfig& config) {
  require_nonempty(downsampled, "session_stats");
  if (config.normalization == Normalization::Percentile) {
    std::vector<double> v(downsampled.begin(), downsampled.end());
    return {percentile(v, config.percentile_low), percentile(v, config.percentile_high)};
  }
  const auto [lo, hi] = std::minmax_element(downsampled.begin(), downsampled.end());
  return {*lo, *hi};
}

MclSequence normalize_user(std::span<const double> channel, double sample_rate,
                           const SessionStats& stats, double output_rate) {
  if (!(stats.max > stats.min)) {
    throw Error(ErrorCode::DegenerateSession, "normalize: session max equals min");
  }
  MclSequence out;
  out.sample_rate = output_rate;
  out.values = block_average(channel, sample_rate, output_rate);
  const double range = stats.max - stats.min;
  for (double& v : out.values) v = std::clamp((v - stats.min) / range, 0.0, 1.0);
  return out;
}

std::vector<double> integrate_record(const RawEmgRecord& record, const PipelineConfig& config) {
  record.validate();
  std::array<std::vector<double>, kChannels> processed;
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto d = detrend(record.channels[c], record.sample_rate, config.detrend_window_s);
    const auto f = bandpass(d, record.sample_rate, config.band_low_hz, config.band_high_hz, config.band_order);
    processed[c] = rectify_envelope(f, record.sample_rate, config.envelope_window_s);
  }
  return balance_and_integrate(processed);
}

SessionStats user_stats(const RawEmgRecord& session, const PipelineConfig& config) {
  const auto total = integrate_record(session, config);
  return session_stats(block_average(total, session.sample_rate, config.output_rate), config);
}

MclSequence process(const RawEmgRecord& record, const PipelineConfig& config,
                    std::optional<SessionStats> stats) {
  const auto total = integrate_record(record, config);
  const SessionStats bounds =
      stats ? *stats : session_stats(block_average(total, record.sample_rate, config.output_rate), config);
  return normalize_user(total, record.sample_rate, bounds, config.output_rate);
}

}  // namespace neckmcl::emg

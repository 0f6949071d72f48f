#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace neckmcl::emg {

/// Channel order of every 4-channel record.
enum class MuscleRole { LeftScm = 0, RightScm = 1, LeftSc = 2, RightSc = 3 };

inline constexpr std::size_t kChannels = 4;
inline constexpr double kRawRate = 2000.0;

std::string_view to_string(MuscleRole role) noexcept;

/// Raw surface EMG in mV, one sequence per muscle, indexed by MuscleRole.
struct RawEmgRecord {
  double sample_rate = kRawRate;
  std::array<std::vector<double>, kChannels> channels;

  std::size_t size() const { return channels[0].size(); }
  const std::vector<double>& channel(MuscleRole role) const {
    return channels[static_cast<std::size_t>(role)];
  }
  /// Throws InvalidInput on unequal/empty channels or a bad sample rate.
  void validate() const;
};

/// Normalised scalar contraction level.
struct MclSequence {
  double sample_rate = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

enum class Normalization { MinMax, Percentile };

struct PipelineConfig {
  double detrend_window_s = 1.0;
  double band_low_hz = 20.0;
  double band_high_hz = 450.0;
  int band_order = 4;
  double envelope_window_s = 0.1;
  double output_rate = 20.0;
  Normalization normalization = Normalization::MinMax;
  double percentile_low = 1.0;
  double percentile_high = 99.0;
};

/// Per-user normalisation bounds, in integrated-envelope units.
struct SessionStats {
  double min = 0.0;
  double max = 0.0;
};

/// Subtracts a centred moving mean (window shrinks at the edges), then the
/// residual global mean, so the output has zero mean.
std::vector<double> detrend(std::span<const double> channel, double sample_rate,
                            double window_s = 1.0);

/// Zero-phase Butterworth bandpass (forward-backward second-order sections).
std::vector<double> bandpass(std::span<const double> channel, double sample_rate,
                             double low_hz = 20.0, double high_hz = 450.0, int order = 4);

/// |x| followed by a centred moving RMS.
std::vector<double> rectify_envelope(std::span<const double> channel, double sample_rate,
                                     double window_s = 0.1);

/// Rescales each right-side channel so its session mean equals its left
/// partner's, then sums the four channels per sample. A pair where exactly
/// one side has zero mean is a DegenerateChannel error; an all-silent pair
/// contributes zero.
std::vector<double> balance_and_integrate(const std::array<std::vector<double>, kChannels>& processed);

/// Block-averages to `output_rate`. Trailing samples that do not fill a
/// block are dropped.
std::vector<double> block_average(std::span<const double> channel, double sample_rate,
                                  double output_rate);

/// Bounds of an integrated channel after block averaging.
SessionStats session_stats(std::span<const double> downsampled,
                           const PipelineConfig& config = {});

/// Downsamples by block averaging, then maps (v - min) / (max - min) clipped
/// to [0, 1].
MclSequence normalize_user(std::span<const double> channel, double sample_rate,
                           const SessionStats& stats, double output_rate = 20.0);

/// Per-channel steps through integration, before normalisation.
std::vector<double> integrate_record(const RawEmgRecord& record, const PipelineConfig& config = {});

/// Full pipeline. Without `stats` the record itself supplies the
/// normalisation bounds.
MclSequence process(const RawEmgRecord& record, const PipelineConfig& config = {},
                    std::optional<SessionStats> stats = std::nullopt);

/// Bounds from a user's full session.
SessionStats user_stats(const RawEmgRecord& session, const PipelineConfig& config = {});

}  // namespace neckmcl::emg

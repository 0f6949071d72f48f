#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "neckmcl/mclnet.hpp"
#include "neckmcl/metrics.hpp"
#include "neckmcl/oracle.hpp"
#include "neckmcl/trajnet.hpp"

namespace neckmcl::eval {

enum class Mode { PostHoc, PreHoc };

const char* to_string(Mode m);
Mode parse_mode(const std::string& text);

/// Metrics over the concatenated sessions of one participant at one anchor.
struct GroupMetrics {
  std::size_t participant = 0;
  std::size_t anchor_index = 0;
  kin::HeadPose anchor;
  double nrmse = 0.0;
  double nmae = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t samples = 0;
};

struct EvaluationReport {
  Mode mode = Mode::PostHoc;
  metrics::Normalizer normalizer = metrics::Normalizer::Range;
  std::vector<GroupMetrics> groups;
  metrics::MeanStd nrmse, nmae;
  /// Correlations over all samples pooled.
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t samples = 0;
  /// Per-participant mean NRMSE/NMAE.
  std::vector<metrics::MeanStd> subject_nrmse, subject_nmae;
};

struct EvalOptions {
  std::size_t stride = kin::kDefaultStride;
  metrics::Normalizer normalizer = metrics::Normalizer::Range;
  bool allow_train_split = false;
  /// Shift applied to the ground truth before comparison, in samples
  /// (positive: compare against later ground truth).
  int target_shift = 0;
};

/// Pre-hoc MCL for one session: stationary at the anchor up to movement
/// onset, the synthesized movement, then a hold at the target; padded or
/// truncated to the session length.
std::vector<double> prehoc_sequence(const trajnet::TrajectoryNet& tnet, const mcl::MclNet& mnet,
                                    const oracle::Session& session, std::size_t stride = kin::kDefaultStride);

/// Requires an evaluation-split dataset unless `allow_train_split`.
/// `tnet` is required in pre-hoc mode.
EvaluationReport evaluate_model(const mcl::MclNet& mnet, const trajnet::TrajectoryNet* tnet,
                                 const oracle::SyntheticDataset& data, Mode mode, const EvalOptions& options = {});

/// Velocity-curve accuracy of predicted Gaussian profiles, per movement and
/// moving axis, over the union of predicted and measured movement windows.
struct VelocityReport {
  std::array<metrics::MeanStd, 2> nrmse, nmae;
  double max_endpoint_error = 0.0;  ///< degrees, over all synthesized trajectories
  std::size_t movements = 0;
};

VelocityReport evaluate_trajectories(const trajnet::TrajectoryNet& tnet, const oracle::SyntheticDataset& data,
                                     metrics::Normalizer normalizer = metrics::Normalizer::Range);

std::string to_json(const EvaluationReport& report);
std::string to_json(const VelocityReport& report);

/// Rows `anchor,metric,value`; anchor is "p<participant>_a<anchor>" or "all".
void write_plot_csv(std::ostream& out, const EvaluationReport& report);
void write_plot_csv(std::ostream& out, const VelocityReport& report);

}  // namespace neckmcl::eval

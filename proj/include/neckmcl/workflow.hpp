#pragma once

#include <map>
#include <vector>

#include "neckmcl/config.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/oracle.hpp"
#include "neckmcl/trajnet.hpp"

namespace neckmcl::workflow {

/// Normalisation bounds per participant, pooled over all of that
/// participant's sessions. Sessions without EMG are an InvalidInput error.
std::map<std::size_t, emg::SessionStats> participant_emg_stats(const oracle::SyntheticDataset& data,
                                                               const emg::PipelineConfig& pipeline = {});

/// MCL targets per session: the oracle ground truth, or the EMG pipeline
/// output normalised with participant bounds.
std::vector<emg::MclSequence> mcl_targets(const oracle::SyntheticDataset& data, const RunConfig& cfg);

std::vector<mcl::TrainingSample> mclnet_samples(const oracle::SyntheticDataset& data, const RunConfig& cfg);

/// One example per session with profiles fitted to the measured movement.
std::vector<trajnet::Example> trajnet_examples(const oracle::SyntheticDataset& data);

/// Training seeds are derived from `cfg.seed`.
mcl::TrainResult train_mclnet(const oracle::SyntheticDataset& data, const RunConfig& cfg);
trajnet::TrainResult train_trajnet(const oracle::SyntheticDataset& data, const RunConfig& cfg);

/// Calibrates `cfg.oracle` unless it is already calibrated.
oracle::OracleConfig calibrated_oracle(const RunConfig& cfg);

}  // namespace neckmcl::workflow

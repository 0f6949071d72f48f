#include "neckmcl/workflow.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "neckmcl/error.hpp"

namespace neckmcl::workflow {

std::map<std::size_t, emg::SessionStats> participant_emg_stats(const oracle::SyntheticDataset& data,
                                                               const emg::PipelineConfig& pipeline) {
  std::map<std::size_t, emg::SessionStats> out;
  for (const auto& s : data.sessions) {
    if (!s.emg) throw Error(ErrorCode::InvalidInput, fmt::format("session {} has no EMG record", s.id));
    const auto total = emg::integrate_record(*s.emg, pipeline);
    const auto bounds =
        emg::session_stats(emg::block_average(total, s.emg->sample_rate, pipeline.output_rate), pipeline);
    const auto [it, fresh] = out.try_emplace(s.participant, bounds);
    if (!fresh) {
      it->second.min = std::min(it->second.min, bounds.min);
      it->second.max = std::max(it->second.max, bounds.max);
    }
  }
  return out;
}

std::vector<emg::MclSequence> mcl_targets(const oracle::SyntheticDataset& data, const RunConfig& cfg) {
  std::vector<emg::MclSequence> out;
  out.reserve(data.sessions.size());
  if (cfg.mclnet_targets == MclTargets::Oracle) {
    for (const auto& s : data.sessions) out.push_back(s.mcl);
    return out;
  }
  const auto bounds = participant_emg_stats(data, cfg.pipeline);
  for (const auto& s : data.sessions) {
    auto m = emg::process(*s.emg, cfg.pipeline, bounds.at(s.participant));
    // Block averaging drops a partial trailing block; hold the last value.
    m.values.resize(s.mcl.size(), m.values.empty() ? 0.0 : m.values.back());
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<mcl::TrainingSample> mclnet_samples(const oracle::SyntheticDataset& data, const RunConfig& cfg) {
  const auto targets = mcl_targets(data, cfg);
  std::vector<mcl::TrainingSample> out;
  for (std::size_t i = 0; i < data.sessions.size(); ++i) {
    // Every session shares its movement onset index, so a fixed phase would
    // only ever show the network one alignment of onset within a window.
    auto v = mcl::make_samples(data.sessions[i].trajectory, targets[i], cfg.mclnet_stride, cfg.mclnet_target_shift,
                               i % cfg.mclnet_stride);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<trajnet::Example> trajnet_examples(const oracle::SyntheticDataset& data) {
  std::vector<trajnet::Example> out;
  out.reserve(data.sessions.size());
  for (const auto& s : data.sessions) {
    const auto& poses = s.trajectory.poses;
    kin::TimedTrajectory movement{s.trajectory.sample_rate,
                                  {poses.begin() + static_cast<std::ptrdiff_t>(s.move_begin),
                                   poses.begin() + static_cast<std::ptrdiff_t>(s.move_end) + 1}};
    const auto fit = traj::fit_movement(movement);
    out.push_back({s.anchor, s.target, {fit[0].profile, fit[1].profile}});
  }
  return out;
}

mcl::TrainResult train_mclnet(const oracle::SyntheticDataset& data, const RunConfig& cfg) {
  const auto samples = mclnet_samples(data, cfg);
  mcl::TrainConfig tc = cfg.mclnet;
  tc.seed = derive_seed(cfg.seed, "train.mclnet");
  return mcl::train(samples, tc);
}

trajnet::TrainResult train_trajnet(const oracle::SyntheticDataset& data, const RunConfig& cfg) {
  const auto examples = trajnet_examples(data);
  trajnet::TrainConfig tc = cfg.trajnet;
  tc.seed = derive_seed(cfg.seed, "train.trajnet");
  return trajnet::train(examples, tc);
}

oracle::OracleConfig calibrated_oracle(const RunConfig& cfg) {
  return cfg.oracle.calibrated ? cfg.oracle : oracle::calibrate(cfg.oracle, {});
}

}  // namespace neckmcl::workflow

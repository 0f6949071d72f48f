#include "neckmcl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <map>

#include "neckmcl/error.hpp"

namespace neckmcl::eval {

const char* to_string(Mode m) { return m == Mode::PostHoc ? "posthoc" : "prehoc"; }

Mode parse_mode(const std::string& text) {
  if (text == "posthoc") return Mode::PostHoc;
  if (text == "prehoc") return Mode::PreHoc;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown mode '{}' (expected posthoc or prehoc)", text));
}

std::vector<double> prehoc_sequence(const trajnet::TrajectoryNet& tnet, const mcl::MclNet& mnet,
                                    const oracle::Session& session, std::size_t stride) {
  const std::size_t n = session.trajectory.size();
  const auto synth = traj::synthesize(trajnet::predict_profile(tnet, session.anchor, session.target),
                                      session.anchor, session.target, kin::kModelRate);
  kin::TimedTrajectory pred;
  pred.sample_rate = kin::kModelRate;
  pred.poses.assign(session.move_begin + 1, session.anchor);
  const auto& moving = synth.trajectory.poses;
  pred.poses.insert(pred.poses.end(), moving.begin() + 1, moving.end());
  if (pred.poses.size() < n) pred.poses.resize(n, session.target);
  pred.poses.resize(n);
  return mcl::estimate_sequence(mnet, pred, stride).mcl.values;
}

EvaluationReport evaluate_model(const mcl::MclNet& mnet, const trajnet::TrajectoryNet* tnet,
                                const oracle::SyntheticDataset& data, Mode mode, const EvalOptions& options) {
  if (data.protocol != oracle::Protocol::Eval && !options.allow_train_split) {
    throw Error(ErrorCode::InvalidInput, "evaluate_model: dataset is not an evaluation split");
  }
  if (mode == Mode::PreHoc && tnet == nullptr) {
    throw Error(ErrorCode::InvalidInput, "evaluate_model: pre-hoc mode needs a trajectory model");
  }
  if (data.sessions.empty()) throw Error(ErrorCode::InvalidInput, "evaluate_model: dataset has no sessions");

  struct Series {
    std::vector<double> predicted, measured;
  };
  std::map<std::pair<std::size_t, std::size_t>, Series> groups;
  std::vector<double> all_pred, all_meas;
  for (const auto& s : data.sessions) {
    const std::vector<double> pred = mode == Mode::PostHoc
                                         ? mcl::estimate_sequence(mnet, s.trajectory, options.stride).mcl.values
                                         : prehoc_sequence(*tnet, mnet, s, options.stride);
    auto& g = groups[{s.participant, s.anchor_index}];
    const auto n = static_cast<std::ptrdiff_t>(pred.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t j = i + options.target_shift;
      if (j < 0 || j >= n) continue;
      g.predicted.push_back(pred[static_cast<std::size_t>(i)]);
      g.measured.push_back(s.mcl.values[static_cast<std::size_t>(j)]);
    }
  }

  EvaluationReport report;
  report.mode = mode;
  report.normalizer = options.normalizer;
  std::vector<double> nrmses, nmaes;
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> per_subject;
  for (const auto& [key, g] : groups) {
    GroupMetrics m;
    m.participant = key.first;
    m.anchor_index = key.second;
    m.anchor = data.anchors.at(key.second);
    m.nrmse = metrics::nrmse(g.predicted, g.measured, options.normalizer);
    m.nmae = metrics::nmae(g.predicted, g.measured, options.normalizer);
    m.pearson = metrics::pearson(g.predicted, g.measured);
    m.spearman = metrics::spearman(g.predicted, g.measured);
    m.samples = g.predicted.size();
    nrmses.push_back(m.nrmse);
    nmaes.push_back(m.nmae);
    per_subject[m.participant].first.push_back(m.nrmse);
    per_subject[m.participant].second.push_back(m.nmae);
    all_pred.insert(all_pred.end(), g.predicted.begin(), g.predicted.end());
    all_meas.insert(all_meas.end(), g.measured.begin(), g.measured.end());
    report.groups.push_back(m);
  }
  report.nrmse = metrics::mean_std(nrmses);
  report.nmae = metrics::mean_std(nmaes);
  report.pearson = metrics::pearson(all_pred, all_meas);
  report.spearman = metrics::spearman(all_pred, all_meas);
  report.samples = all_pred.size();
  for (const auto& [p, v] : per_subject) {
    report.subject_nrmse.push_back(metrics::mean_std(v.first));
    report.subject_nmae.push_back(metrics::mean_std(v.second));
  }
  return report;
}

VelocityReport evaluate_trajectories(const trajnet::TrajectoryNet& tnet, const oracle::SyntheticDataset& data,
                                     metrics::Normalizer normalizer) {
  VelocityReport report;
  std::array<std::vector<double>, 2> nrmses, nmaes;
  for (const auto& s : data.sessions) {
    const auto synth = traj::synthesize(trajnet::predict_profile(tnet, s.anchor, s.target), s.anchor, s.target,
                                        kin::kModelRate);
    const kin::HeadPose last = synth.trajectory.poses.back();
    report.max_endpoint_error = std::max(
        {report.max_endpoint_error, std::abs(last.pitch - s.target.pitch), std::abs(last.yaw - s.target.yaw)});
    ++report.movements;

    const auto kin = kin::differentiate(s.trajectory);
    const kin::HeadPose delta = s.target - s.anchor;
    const std::size_t measured_len = s.move_end - s.move_begin + 1;
    const std::size_t len = std::max(measured_len, synth.velocity[0].size());
    for (std::size_t axis = 0; axis < 2; ++axis) {
      if ((axis == 0 ? delta.pitch : delta.yaw) == 0.0) continue;
      std::vector<double> pred(len, 0.0), meas(len, 0.0);
      for (std::size_t i = 0; i < len; ++i) {
        if (i < synth.velocity[axis].size()) pred[i] = synth.velocity[axis][i];
        const std::size_t j = s.move_begin + i;
        if (j < kin.size()) meas[i] = axis == 0 ? kin.velocity[j].pitch : kin.velocity[j].yaw;
      }
      nrmses[axis].push_back(metrics::nrmse(pred, meas, normalizer));
      nmaes[axis].push_back(metrics::nmae(pred, meas, normalizer));
    }
  }
  for (std::size_t axis = 0; axis < 2; ++axis) {
    report.nrmse[axis] = metrics::mean_std(nrmses[axis]);
    report.nmae[axis] = metrics::mean_std(nmaes[axis]);
  }
  return report;
}

namespace {

nlohmann::json ms_json(const metrics::MeanStd& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"count", m.count}};
}

}  // namespace

std::string to_json(const EvaluationReport& r) {
  nlohmann::json doc;
  doc["mode"] = to_string(r.mode);
  doc["normalizer"] = metrics::to_string(r.normalizer);
  doc["nrmse_percent"] = ms_json(r.nrmse);
  doc["nmae_percent"] = ms_json(r.nmae);
  doc["pearson"] = r.pearson;
  doc["spearman"] = r.spearman;
  doc["samples"] = r.samples;
  nlohmann::json subjects = nlohmann::json::array();
  for (std::size_t i = 0; i < r.subject_nrmse.size(); ++i) {
    subjects.push_back({{"nrmse_percent", ms_json(r.subject_nrmse[i])}, {"nmae_percent", ms_json(r.subject_nmae[i])}});
  }
  doc["subjects"] = std::move(subjects);
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"participant", g.participant},
                      {"anchor_index", g.anchor_index},
                      {"anchor_pitch_deg", g.anchor.pitch},
                      {"anchor_yaw_deg", g.anchor.yaw},
                      {"nrmse_percent", g.nrmse},
                      {"nmae_percent", g.nmae},
                      {"pearson", g.pearson},
                      {"spearman", g.spearman},
                      {"samples", g.samples}});
  }
  doc["groups"] = std::move(groups);
  return doc.dump(2) + "\n";
}

std::string to_json(const VelocityReport& r) {
  nlohmann::json doc;
  doc["mode"] = "velocity";
  doc["movements"] = r.movements;
  doc["max_endpoint_error_deg"] = r.max_endpoint_error;
  doc["pitch"] = {{"nrmse_percent", ms_json(r.nrmse[0])}, {"nmae_percent", ms_json(r.nmae[0])}};
  doc["yaw"] = {{"nrmse_percent", ms_json(r.nrmse[1])}, {"nmae_percent", ms_json(r.nmae[1])}};
  return doc.dump(2) + "\n";
}

void write_plot_csv(std::ostream& out, const EvaluationReport& r) {
  out << "anchor,metric,value\n";
  for (const auto& g : r.groups) {
    const std::string key = fmt::format("p{}_a{}", g.participant, g.anchor_index);
    out << fmt::format("{},nrmse,{}\n{},nmae,{}\n{},pearson,{}\n{},spearman,{}\n", key, g.nrmse, key, g.nmae, key,
                       g.pearson, key, g.spearman);
  }
  out << fmt::format("all,nrmse_mean,{}\nall,nrmse_std,{}\nall,nmae_mean,{}\nall,nmae_std,{}\n", r.nrmse.mean,
                     r.nrmse.std, r.nmae.mean, r.nmae.std);
  out << fmt::format("all,pearson,{}\nall,spearman,{}\n", r.pearson, r.spearman);
}

void write_plot_csv(std::ostream& out, const VelocityReport& r) {
  out << "anchor,metric,value\n";
  const char* axes[2] = {"pitch", "yaw"};
  for (std::size_t a = 0; a < 2; ++a) {
    out << fmt::format("all,{}_velocity_nrmse_mean,{}\nall,{}_velocity_nrmse_std,{}\n", axes[a], r.nrmse[a].mean,
                       axes[a], r.nrmse[a].std);
    out << fmt::format("all,{}_velocity_nmae_mean,{}\nall,{}_velocity_nmae_std,{}\n", axes[a], r.nmae[a].mean,
                       axes[a], r.nmae[a].std);
  }
  out << fmt::format("all,max_endpoint_error_deg,{}\n", r.max_endpoint_error);
}

}  // namespace neckmcl::eval

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "neckmcl/config.hpp"
#include "neckmcl/csv.hpp"
#include "neckmcl/dataset_io.hpp"
#include "neckmcl/error.hpp"
#include "neckmcl/evaluation.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/oracle.hpp"
#include "neckmcl/scanpath.hpp"
#include "neckmcl/selftest.hpp"
#include "neckmcl/trajnet.hpp"
#include "neckmcl/workflow.hpp"

namespace fs = std::filesystem;
using neckmcl::Error;
using neckmcl::ErrorCode;
using nlohmann::ordered_json;

namespace {

// Exit status for usage errors and failed self-tests; library errors use
// neckmcl::exit_status.
constexpr int kUsageStatus = 13;
constexpr int kSelftestStatus = 1;

void error_line(std::string_view code, const std::string& message) {
  std::string quoted;
  for (char c : message) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c == '\n' ? ' ' : c;
  }
  std::cerr << "error code=" << code << " message=\"" << quoted << "\"\n";
}

neckmcl::kin::HeadPose parse_pose(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  neckmcl::kin::HeadPose pose{};
  try {
    if (comma == std::string::npos) throw std::invalid_argument("missing comma");
    std::size_t used = 0;
    const std::string p = text.substr(0, comma), y = text.substr(comma + 1);
    pose.pitch = std::stod(p, &used);
    if (used != p.size()) throw std::invalid_argument("trailing text");
    pose.yaw = std::stod(y, &used);
    if (used != y.size()) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, fmt::format("{}: expected \"pitch,yaw\" in degrees, got '{}'", flag, text));
  }
  return pose;
}

neckmcl::nn::Checkpoint load_checkpoint(const fs::path& path, const std::string& kind) {
  auto ckpt = neckmcl::nn::Checkpoint::load(path);
  if (ckpt.kind != kind) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("{}: checkpoint kind is '{}', expected '{}'", path.string(), ckpt.kind, kind));
  }
  return ckpt;
}

neckmcl::mcl::MclNet load_mclnet(const fs::path& path) {
  return neckmcl::mcl::from_checkpoint(load_checkpoint(path, neckmcl::mcl::kCheckpointKind));
}

neckmcl::trajnet::TrajectoryNet load_trajnet(const fs::path& path) {
  return neckmcl::trajnet::from_checkpoint(load_checkpoint(path, neckmcl::trajnet::kCheckpointKind));
}

struct Global {
  std::string config_path;
  std::vector<std::string> overrides;

  neckmcl::RunConfig load() const {
    neckmcl::RunConfig cfg = config_path.empty() ? neckmcl::RunConfig{} : neckmcl::load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::Config, fmt::format("--set expects key=value, got '{}'", kv));
      neckmcl::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    // Re-validate the merged result.
    return neckmcl::parse_config(neckmcl::dump_config(cfg), config_path.empty() ? "--set" : config_path);
  }
};

std::string join_json(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json profile_json(const neckmcl::traj::GaussianProfile& g) {
  return {{"amplitude_dps", g.amplitude}, {"center_s", g.center}, {"width_s", g.width}, {"degenerate", g.degenerate}};
}

// ---------------------------------------------------------------- commands

int cmd_synth_gen(const Global& g, const std::string& protocol, std::optional<std::uint64_t> seed,
                  const std::string& out, bool with_emg, std::size_t participants) {
  auto cfg = g.load();
  if (seed) cfg.seed = *seed;
  const auto oracle_cfg = neckmcl::workflow::calibrated_oracle(cfg);
  const auto p = neckmcl::oracle::parse_protocol(protocol);
  const auto data = neckmcl::oracle::gen_dataset(oracle_cfg, p, cfg.seed, {with_emg, participants});
  neckmcl::io::write_dataset(out, data, oracle_cfg);
  std::cout << fmt::format("protocol={} split={} seed={} anchors={} sessions={} emg={}\n", protocol,
                           neckmcl::io::split_name(p), cfg.seed, data.anchors.size(), data.sessions.size(),
                           with_emg ? "yes" : "no");
  return 0;
}

int cmd_synth_calibrate(const Global& g) {
  const auto cfg = g.load();
  neckmcl::oracle::CalibrationReport rep;
  const auto c = neckmcl::oracle::calibrate(cfg.oracle, {}, &rep);
  ordered_json j{{"baseline", c.baseline},
                 {"pitch_offset_deg", c.pitch_offset},
                 {"weight_pitch", c.weight_pitch},
                 {"weight_yaw", c.weight_yaw},
                 {"mcl_neutral", rep.neutral},
                 {"mcl_corner", rep.corner},
                 {"mcl_grid_mean", rep.grid_mean},
                 {"mcl_yaw_zero", rep.yaw_zero},
                 {"mcl_yaw_extreme", rep.yaw_extreme},
                 {"mcl_pitch_up", rep.pitch_up},
                 {"mcl_pitch_down", rep.pitch_down},
                 {"max_primary_residual", rep.max_primary_residual}};
  std::cout << join_json(j);
  return 0;
}

int cmd_emg_process(const Global& g, const std::string& in, const std::string& out, const std::string& stats_from) {
  const auto cfg = g.load();
  const auto record = neckmcl::io::read_raw_emg(in);
  std::optional<neckmcl::emg::SessionStats> bounds;
  if (!stats_from.empty()) bounds = neckmcl::emg::user_stats(neckmcl::io::read_raw_emg(stats_from), cfg.pipeline);
  const auto mcl = neckmcl::emg::process(record, cfg.pipeline, bounds);
  neckmcl::io::write_file(out, neckmcl::io::mcl_csv(mcl));
  std::cout << fmt::format("samples={} rate_hz={}\n", mcl.size(), mcl.sample_rate);
  return 0;
}

int cmd_train(const Global& g, const std::string& which, const std::string& data_dir, const std::string& out,
              std::optional<std::uint64_t> seed) {
  auto cfg = g.load();
  if (seed) cfg.seed = *seed;
  if (which == "mclnet") {
    const auto data = neckmcl::io::read_dataset(data_dir, cfg.mclnet_targets == neckmcl::MclTargets::Emg);
    auto result = neckmcl::workflow::train_mclnet(data, cfg);
    neckmcl::mcl::to_checkpoint(result.net).save(out);
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      std::cout << fmt::format("epoch={} loss={}\n", e + 1, neckmcl::io::format_number(result.loss_history[e]));
    }
    std::cout << fmt::format("inertia={}\n", neckmcl::io::format_number(result.net.inertia()));
  } else {
    const auto data = neckmcl::io::read_dataset(data_dir, false);
    auto result = neckmcl::workflow::train_trajnet(data, cfg);
    neckmcl::trajnet::to_checkpoint(result.net).save(out);
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      std::cout << fmt::format("epoch={} loss={}\n", e + 1, neckmcl::io::format_number(result.loss_history[e]));
    }
  }
  return 0;
}

int cmd_estimate(const Global& g, const std::string& ckpt, const std::string& trajectory, const std::string& out,
                 std::optional<std::size_t> stride) {
  const auto cfg = g.load();
  const auto net = load_mclnet(ckpt);
  auto traj = neckmcl::io::read_trajectory(trajectory);
  if (traj.sample_rate != neckmcl::kin::kModelRate) traj = neckmcl::kin::resample(traj, neckmcl::kin::kModelRate);
  const auto est = neckmcl::mcl::estimate_sequence(net, traj, stride.value_or(cfg.eval_stride));
  neckmcl::io::write_file(out, neckmcl::io::mcl_csv(est.mcl));
  std::size_t filled = 0;
  for (bool f : est.filled) filled += f ? 1 : 0;
  std::cout << fmt::format("samples={} filled={}\n", est.mcl.size(), filled);
  return 0;
}

int cmd_predict(const Global& g, const std::string& ckpt_mcl, const std::string& ckpt_traj, const std::string& start,
                const std::string& end, const std::string& trajectory_out, const std::string& mcl_out) {
  const auto cfg = g.load();
  const auto mnet = load_mclnet(ckpt_mcl);
  const auto tnet = load_trajnet(ckpt_traj);
  const auto rs = parse_pose(start, "--start");
  const auto re = parse_pose(end, "--end");
  if (!neckmcl::kin::is_finite(rs) || !neckmcl::kin::is_finite(re)) {
    throw Error(ErrorCode::InvalidInput, "predict: poses must be finite");
  }
  const auto f = neckmcl::trajnet::forecast(tnet, mnet, rs, re, cfg.eval_stride);
  ordered_json j{{"start", {{"pitch_deg", rs.pitch}, {"yaw_deg", rs.yaw}}},
                 {"end", {{"pitch_deg", re.pitch}, {"yaw_deg", re.yaw}}},
                 {"hc_mcl_s", f.cumulative_mcl},
                 {"end_time_s", f.synthesis.end_time},
                 {"profile", {{"pitch", profile_json(f.profile.pitch)}, {"yaw", profile_json(f.profile.yaw)}}}};
  std::cout << join_json(j);
  if (!trajectory_out.empty()) neckmcl::io::write_file(trajectory_out, neckmcl::io::trajectory_csv(f.synthesis.trajectory));
  if (!mcl_out.empty()) {
    neckmcl::emg::MclSequence m{neckmcl::kin::kModelRate, f.mcl};
    neckmcl::io::write_file(mcl_out, neckmcl::io::mcl_csv(m));
  }
  return 0;
}

neckmcl::scan::RotationPartition make_partition(const neckmcl::RunConfig& cfg, std::uint64_t seed, std::size_t index) {
  neckmcl::Rng rng(neckmcl::scan::partition_seed(seed, index));
  return neckmcl::scan::partition_rotation(rng, cfg.scan_total, cfg.scan_steps, cfg.scan_min_step);
}

neckmcl::scan::ScanPath make_path(const neckmcl::scan::RotationPartition& part, neckmcl::scan::Condition c,
                                  std::uint64_t seed, std::size_t index,
                                  const neckmcl::trajnet::TrajectoryNet& tnet, const neckmcl::mcl::MclNet& mnet) {
  neckmcl::Rng rng(neckmcl::scan::tie_seed(seed, index, c));
  return neckmcl::scan::generate(c, part, tnet, mnet, rng);
}

int cmd_scanpath_gen(const Global& g, const std::string& condition, std::optional<std::uint64_t> seed,
                     std::size_t partition, const std::string& ckpt_mcl, const std::string& ckpt_traj,
                     const std::string& out) {
  auto cfg = g.load();
  if (seed) cfg.seed = *seed;
  const auto c = neckmcl::scan::parse_condition(condition);
  const auto mnet = load_mclnet(ckpt_mcl);
  const auto tnet = load_trajnet(ckpt_traj);
  const auto part = make_partition(cfg, cfg.seed, partition);
  const auto path = make_path(part, c, cfg.seed, partition, tnet, mnet);
  neckmcl::io::write_file(out, neckmcl::io::scanpath_csv(path));
  std::cout << fmt::format("condition={} total_rotation_deg={} total_hc={} coverage={}\n", condition,
                           neckmcl::io::format_number(path.total_rotation()),
                           neckmcl::io::format_number(path.total_hc()),
                           neckmcl::io::format_number(neckmcl::scan::coverage_report(path)));
  return 0;
}

int cmd_scanpath_study(const Global& g, std::optional<std::uint64_t> seed, const std::string& ckpt_mcl,
                       const std::string& ckpt_traj, const std::string& out) {
  auto cfg = g.load();
  if (seed) cfg.seed = *seed;
  const auto mnet = load_mclnet(ckpt_mcl);
  const auto tnet = load_trajnet(ckpt_traj);
  const auto manifest = neckmcl::scan::study_manifest(cfg.seed, cfg.scan_partitions);
  ordered_json entries = ordered_json::array();
  for (const auto& e : manifest) {
    const auto part = make_partition(cfg, cfg.seed, e.partition);
    const auto path = make_path(part, e.condition, cfg.seed, e.partition, tnet, mnet);
    const std::string file = fmt::format("session{:02}_{}.csv", e.session, neckmcl::scan::to_string(e.condition));
    neckmcl::io::write_file(fs::path(out) / file, neckmcl::io::scanpath_csv(path));
    entries.push_back({{"session", e.session},
                       {"partition", e.partition},
                       {"condition", neckmcl::scan::to_string(e.condition)},
                       {"file", file},
                       {"total_rotation_deg", path.total_rotation()},
                       {"total_hc", path.total_hc()},
                       {"coverage", neckmcl::scan::coverage_report(path)}});
  }
  ordered_json j{{"format_version", 1}, {"seed", cfg.seed}, {"partitions", cfg.scan_partitions}, {"entries", entries}};
  neckmcl::io::write_file(fs::path(out) / "study.json", join_json(j));
  std::cout << fmt::format("sessions={} dir={}\n", manifest.size(), out);
  return 0;
}

int cmd_evaluate(const Global& g, const std::string& mode, const std::string& data_dir,
                 const std::vector<std::string>& ckpts, const std::string& out, bool allow_train) {
  const auto cfg = g.load();
  std::optional<neckmcl::mcl::MclNet> mnet;
  std::optional<neckmcl::trajnet::TrajectoryNet> tnet;
  for (const auto& path : ckpts) {
    const auto ckpt = neckmcl::nn::Checkpoint::load(path);
    if (ckpt.kind == neckmcl::mcl::kCheckpointKind) {
      mnet = neckmcl::mcl::from_checkpoint(ckpt);
    } else if (ckpt.kind == neckmcl::trajnet::kCheckpointKind) {
      tnet = neckmcl::trajnet::from_checkpoint(ckpt);
    } else {
      throw Error(ErrorCode::InvalidInput, fmt::format("{}: unknown checkpoint kind '{}'", path, ckpt.kind));
    }
  }
  const auto data = neckmcl::io::read_dataset(data_dir, false);
  if (!allow_train && data.protocol != neckmcl::oracle::Protocol::Eval) {
    throw Error(ErrorCode::InvalidInput, "evaluate: dataset is the training split (pass --allow-train-split)");
  }
  std::string json;
  std::ostringstream plot;
  std::string summary;
  if (mode == "velocity") {
    if (!tnet) throw Error(ErrorCode::InvalidInput, "evaluate velocity: a trajnet checkpoint is required");
    const auto rep = neckmcl::eval::evaluate_trajectories(*tnet, data, cfg.eval_normalizer);
    json = neckmcl::eval::to_json(rep);
    neckmcl::eval::write_plot_csv(plot, rep);
    summary = fmt::format("mode=velocity movements={} nrmse_pitch={:.3f} nrmse_yaw={:.3f} max_endpoint_error_deg={:.3g}\n",
                          rep.movements, rep.nrmse[0].mean, rep.nrmse[1].mean, rep.max_endpoint_error);
  } else {
    const auto m = neckmcl::eval::parse_mode(mode);
    if (!mnet) throw Error(ErrorCode::InvalidInput, "evaluate: an mclnet checkpoint is required");
    if (m == neckmcl::eval::Mode::PreHoc && !tnet) {
      throw Error(ErrorCode::InvalidInput, "evaluate prehoc: a trajnet checkpoint is required");
    }
    neckmcl::eval::EvalOptions opt;
    opt.stride = cfg.eval_stride;
    opt.normalizer = cfg.eval_normalizer;
    opt.allow_train_split = allow_train;
    const auto rep = neckmcl::eval::evaluate_model(*mnet, tnet ? &*tnet : nullptr, data, m, opt);
    json = neckmcl::eval::to_json(rep);
    neckmcl::eval::write_plot_csv(plot, rep);
    summary = fmt::format("mode={} groups={} nrmse={:.3f}+-{:.3f} nmae={:.3f}+-{:.3f} pearson={:.4f} spearman={:.4f}\n",
                          mode, rep.groups.size(), rep.nrmse.mean, rep.nrmse.std, rep.nmae.mean, rep.nmae.std,
                          rep.pearson, rep.spearman);
  }
  neckmcl::io::write_file(fs::path(out) / fmt::format("{}_report.json", mode), json);
  neckmcl::io::write_file(fs::path(out) / fmt::format("{}_plot.csv", mode), plot.str());
  std::cout << summary;
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  std::size_t failed = 0;
  for (const auto& group : {neckmcl::gradient_checks(seed), neckmcl::metric_examples()}) {
    for (const auto& c : group) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
      failed += c.passed ? 0 : 1;
    }
  }
  if (failed > 0) {
    error_line("selftest_failure", fmt::format("{} check(s) failed", failed));
    return kSelftestStatus;
  }
  return 0;
}

int cmd_config_dump(const Global& g) {
  const auto cfg = g.load();
  for (const auto& k : neckmcl::config_keys()) {
    std::cout << "# " << k.doc << "\n" << k.key << " = " << neckmcl::get_config_value(cfg, k.key) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neck muscle-contraction modelling toolkit"};
  app.require_subcommand(1);
  Global global;
  app.add_option("--config", global.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", global.overrides, "Override one config key (key=value); repeatable");

  std::function<int()> run;

  // synth
  auto* synth = app.add_subcommand("synth", "Synthetic oracle datasets");
  synth->require_subcommand(1);
  struct {
    std::string protocol, out;
    std::optional<std::uint64_t> seed;
    bool emg = false;
    std::size_t participants = 0;
  } sg;
  auto* synth_gen = synth->add_subcommand("gen", "Generate a pilot (train) or eval dataset");
  synth_gen->add_option("--protocol", sg.protocol, "pilot or eval")->required()->check(CLI::IsMember({"pilot", "eval"}));
  synth_gen->add_option("--seed", sg.seed, "Master seed (overrides config 'seed')");
  synth_gen->add_option("--out", sg.out, "Output dataset directory")->required();
  synth_gen->add_flag("--emg", sg.emg, "Also synthesize 2000 Hz raw EMG per session");
  synth_gen->add_option("--participants", sg.participants, "Protocol repetitions (0: config default)");
  synth_gen->callback([&] { run = [&] { return cmd_synth_gen(global, sg.protocol, sg.seed, sg.out, sg.emg, sg.participants); }; });
  auto* synth_cal = synth->add_subcommand("calibrate", "Calibrate the oracle and print the stationary summary");
  synth_cal->callback([&] { run = [&] { return cmd_synth_calibrate(global); }; });

  // emg
  auto* emg_cmd = app.add_subcommand("emg", "EMG processing");
  emg_cmd->require_subcommand(1);
  struct {
    std::string in, out, stats_from;
  } ep;
  auto* emg_process = emg_cmd->add_subcommand("process", "Raw 4-channel EMG CSV to 20 Hz MCL CSV");
  emg_process->add_option("--in", ep.in, "Raw EMG CSV (t_s,l_scm_mv,r_scm_mv,l_sc_mv,r_sc_mv)")->required();
  emg_process->add_option("--out", ep.out, "Output MCL CSV (t_s,mcl)")->required();
  emg_process->add_option("--stats-from", ep.stats_from,
                          "Raw EMG CSV of the user's full session supplying normalisation bounds");
  emg_process->callback([&] { run = [&] { return cmd_emg_process(global, ep.in, ep.out, ep.stats_from); }; });

  // train
  auto* train = app.add_subcommand("train", "Train a network on a synthetic dataset");
  train->require_subcommand(1);
  struct {
    std::string data, out;
    std::optional<std::uint64_t> seed;
  } tr;
  std::string which;
  for (const char* name : {"mclnet", "trajnet"}) {
    auto* sub = train->add_subcommand(name, std::string("Train ") + name);
    sub->add_option("--data", tr.data, "Dataset directory")->required();
    sub->add_option("--out", tr.out, "Checkpoint path (JSON)")->required();
    sub->add_option("--seed", tr.seed, "Master seed (overrides config 'seed')");
    sub->callback([&, name] {
      which = name;
      run = [&] { return cmd_train(global, which, tr.data, tr.out, tr.seed); };
    });
  }

  // estimate
  struct {
    std::string ckpt, trajectory, out;
    std::optional<std::size_t> stride;
  } es;
  auto* estimate = app.add_subcommand("estimate", "Post-hoc MCL from a measured trajectory");
  estimate->add_option("--ckpt", es.ckpt, "MCLNet checkpoint")->required();
  estimate->add_option("--trajectory", es.trajectory, "Trajectory CSV (t_s,pitch_deg,yaw_deg); resampled to 20 Hz")->required();
  estimate->add_option("--out", es.out, "Output MCL CSV")->required();
  estimate->add_option("--stride", es.stride, "Window stride 1-4 (default: config eval.stride)")->check(CLI::Range(1, 4));
  estimate->callback([&] { run = [&] { return cmd_estimate(global, es.ckpt, es.trajectory, es.out, es.stride); }; });

  // predict
  struct {
    std::string ckpt_mcl, ckpt_traj, start, end, trajectory_out, mcl_out;
  } pr;
  auto* predict = app.add_subcommand("predict", "Pre-hoc forecast for one movement: H_c, t_e and profiles");
  predict->add_option("--ckpt-mcl", pr.ckpt_mcl, "MCLNet checkpoint")->required();
  predict->add_option("--ckpt-traj", pr.ckpt_traj, "TrajectoryNet checkpoint")->required();
  predict->add_option("--start", pr.start, "Start pose \"pitch,yaw\" in degrees")->required();
  predict->add_option("--end", pr.end, "End pose \"pitch,yaw\" in degrees")->required();
  predict->add_option("--trajectory-out", pr.trajectory_out, "Write the synthesized trajectory CSV");
  predict->add_option("--mcl-out", pr.mcl_out, "Write the predicted MCL CSV over the movement");
  predict->callback([&] {
    run = [&] { return cmd_predict(global, pr.ckpt_mcl, pr.ckpt_traj, pr.start, pr.end, pr.trajectory_out, pr.mcl_out); };
  });

  // scanpath
  auto* scanpath = app.add_subcommand("scanpath", "Discomfort-aware scan paths");
  scanpath->require_subcommand(1);
  struct {
    std::string condition, ckpt_mcl, ckpt_traj, out;
    std::optional<std::uint64_t> seed;
    std::size_t partition = 0;
  } sp;
  auto* scan_gen = scanpath->add_subcommand("gen", "Generate one MAX, RND or MIN scan path");
  scan_gen->add_option("--condition", sp.condition, "max, rnd or min")->required()->check(CLI::IsMember({"max", "rnd", "min"}));
  scan_gen->add_option("--seed", sp.seed, "Master seed (overrides config 'seed')");
  scan_gen->add_option("--partition", sp.partition, "Partition index under the seed (default 0)");
  scan_gen->add_option("--ckpt-mcl", sp.ckpt_mcl, "MCLNet checkpoint")->required();
  scan_gen->add_option("--ckpt-traj", sp.ckpt_traj, "TrajectoryNet checkpoint")->required();
  scan_gen->add_option("--out", sp.out, "Output path CSV")->required();
  scan_gen->callback([&] {
    run = [&] { return cmd_scanpath_gen(global, sp.condition, sp.seed, sp.partition, sp.ckpt_mcl, sp.ckpt_traj, sp.out); };
  });
  auto* scan_study = scanpath->add_subcommand("study", "Generate every path of a counterbalanced study manifest");
  scan_study->add_option("--seed", sp.seed, "Master seed (overrides config 'seed')");
  scan_study->add_option("--ckpt-mcl", sp.ckpt_mcl, "MCLNet checkpoint")->required();
  scan_study->add_option("--ckpt-traj", sp.ckpt_traj, "TrajectoryNet checkpoint")->required();
  scan_study->add_option("--out", sp.out, "Output directory")->required();
  scan_study->callback([&] { run = [&] { return cmd_scanpath_study(global, sp.seed, sp.ckpt_mcl, sp.ckpt_traj, sp.out); }; });

  // evaluate
  struct {
    std::string mode, data, out;
    std::vector<std::string> ckpts;
    bool allow_train = false;
  } ev;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluation report and plot CSV");
  evaluate->add_option("--mode", ev.mode, "posthoc, prehoc or velocity")->required()->check(CLI::IsMember({"posthoc", "prehoc", "velocity"}));
  evaluate->add_option("--data", ev.data, "Evaluation dataset directory")->required();
  evaluate->add_option("--ckpts", ev.ckpts, "Checkpoint files (mclnet and/or trajnet, detected by kind)")->required();
  evaluate->add_option("--out", ev.out, "Report directory")->required();
  evaluate->add_flag("--allow-train-split", ev.allow_train, "Accept a training-split dataset");
  evaluate->callback([&] { run = [&] { return cmd_evaluate(global, ev.mode, ev.data, ev.ckpts, ev.out, ev.allow_train); }; });

  // selftest
  std::uint64_t selftest_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "Gradient checks and metric examples");
  selftest->add_option("--seed", selftest_seed, "Seed for random probe tensors");
  selftest->callback([&] { run = [&] { return cmd_selftest(selftest_seed); }; });

  // config
  auto* config = app.add_subcommand("config", "Configuration");
  config->require_subcommand(1);
  auto* config_dump = config->add_subcommand("dump", "Print every key with its documentation and effective value");
  config_dump->callback([&] { run = [&] { return cmd_config_dump(global); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    return kUsageStatus;
  }

  try {
    return run ? run() : 0;
  } catch (const Error& e) {
    error_line(neckmcl::to_string(e.code()), e.what());
    return neckmcl::exit_status(e.code());
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return 1;
  }
}

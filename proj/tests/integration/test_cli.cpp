#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>

#include <sys/wait.h>

#include <json.hpp>

#include "neckmcl/csv.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using neckmcl::io::read_file;
using testsupport::TempDir;

namespace {

struct RunResult {
  int status = -1;
  std::string out, err;
};

RunResult run(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = std::string(NECKMCL_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

const std::string kFast = "--set mclnet.epochs=2 --set mclnet.lr_drop_epoch=1 --set trajnet.epochs=5 ";

// First session file with `suffix`, in name order.
std::string first_session(const fs::path& dataset, const std::string& suffix) {
  std::string best;
  for (const auto& e : fs::directory_iterator(dataset / "sessions")) {
    const auto name = e.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix) && (best.empty() || name < best)) best = name;
  }
  REQUIRE_FALSE(best.empty());
  return (dataset / "sessions" / best).string();
}

// Every subcommand once, into `dir`. Returns stdout per step.
std::map<std::string, std::string> pipeline(const fs::path& dir) {
  std::map<std::string, std::string> outs;
  const auto step = [&](const std::string& name, const std::string& args) {
    const auto r = run(args, dir);
    INFO(name, ": ", r.err);
    REQUIRE(r.status == 0);
    outs[name] = r.out;
  };
  const std::string d = dir.string();
  step("gen_pilot", "synth gen --protocol pilot --seed 3 --participants 1 --out " + d + "/pilot");
  step("gen_eval", "synth gen --protocol eval --seed 4 --participants 1 --out " + d + "/eval");
  step("gen_emg", "synth gen --protocol eval --seed 5 --participants 1 --emg --out " + d + "/emg");
  step("emg", "emg process --in " + first_session(dir / "emg", ".emg.csv") + " --out " + d + "/emg.mcl.csv");
  step("train_mcl", kFast + "train mclnet --data " + d + "/pilot --out " + d + "/mcl.json");
  step("train_traj", kFast + "train trajnet --data " + d + "/pilot --out " + d + "/traj.json");
  step("estimate", "estimate --ckpt " + d + "/mcl.json --trajectory " + first_session(dir / "eval", ".traj.csv") +
                       " --out " + d + "/est.csv --stride 2");
  step("predict", "predict --ckpt-mcl " + d + "/mcl.json --ckpt-traj " + d +
                      "/traj.json --start 0,0 --end 10,-30 --trajectory-out " + d + "/pred.traj.csv --mcl-out " + d +
                      "/pred.mcl.csv");
  for (const char* c : {"max", "rnd", "min"}) {
    step(std::string("scan_") + c, std::string("scanpath gen --condition ") + c + " --seed 8 --ckpt-mcl " + d +
                                       "/mcl.json --ckpt-traj " + d + "/traj.json --out " + d + "/scan_" + c + ".csv");
  }
  step("study", "scanpath study --seed 8 --ckpt-mcl " + d + "/mcl.json --ckpt-traj " + d + "/traj.json --out " + d +
                    "/study");
  for (const char* m : {"posthoc", "prehoc", "velocity"}) {
    step(std::string("eval_") + m, std::string("evaluate --mode ") + m + " --data " + d + "/eval --ckpts " + d +
                                       "/mcl.json " + d + "/traj.json --out " + d + "/report");
  }
  step("config", "--set trajnet.loss=curve config dump");
  return outs;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).string();
    if (rel == "stdout.txt" || rel == "stderr.txt") continue;
    files[rel] = read_file(e.path());
  }
  return files;
}

}  // namespace

TEST_CASE("every subcommand is byte-deterministic; outputs are consistent") {
  TempDir a("cli_a"), b("cli_b");
  const auto oa = pipeline(a.path());
  const auto ob = pipeline(b.path());

  for (const auto& [name, text] : oa) {
    // Paths in the study summary differ by directory only.
    if (name == "study") continue;
    CHECK_MESSAGE(text == ob.at(name), name);
  }
  const auto fa = tree(a.path()), fb = tree(b.path());
  CHECK(fa.size() == fb.size());
  std::size_t compared = 0;
  for (const auto& [rel, bytes] : fa) {
    REQUIRE_MESSAGE(fb.count(rel) == 1, rel);
    CHECK_MESSAGE(bytes == fb.at(rel), rel);
    ++compared;
  }
  MESSAGE(compared, " files compared");

  // Shared partition: identical rotation totals across conditions.
  std::map<std::string, double> totals;
  for (const char* c : {"max", "rnd", "min"}) {
    const auto path = neckmcl::io::parse_scanpath(fa.at(std::string("scan_") + c + ".csv"), c);
    CHECK(path.poses.size() == 31);
    totals[c] = path.total_rotation();
  }
  CHECK(totals["max"] == totals["rnd"]);
  CHECK(totals["rnd"] == totals["min"]);

  const auto study = nlohmann::json::parse(fa.at("study/study.json"));
  CHECK(study.at("entries").size() == 18);
  const auto report = nlohmann::json::parse(fa.at("report/posthoc_report.json"));
  CHECK(report.at("mode") == "posthoc");
  CHECK(fa.at("report/prehoc_plot.csv").rfind("anchor,metric,value\n", 0) == 0);
  CHECK(oa.at("config").find("trajnet.loss = curve") != std::string::npos);

  const auto pred = nlohmann::json::parse(oa.at("predict"));
  CHECK(pred.at("hc_mcl_s").get<double>() > 0.0);
  const auto traj = neckmcl::io::parse_trajectory(fa.at("pred.traj.csv"), "pred");
  CHECK(std::abs(traj.poses.back().yaw + 30.0) <= 1e-6);
}

TEST_CASE("predict with start equal to end gives zero cumulative MCL") {
  TempDir dir("cli_predict");
  const std::string d = dir.path().string();
  REQUIRE(run("synth gen --protocol pilot --seed 3 --participants 1 --out " + d + "/pilot", dir.path()).status == 0);
  REQUIRE(run(kFast + "train mclnet --data " + d + "/pilot --out " + d + "/mcl.json", dir.path()).status == 0);
  REQUIRE(run(kFast + "train trajnet --data " + d + "/pilot --out " + d + "/traj.json", dir.path()).status == 0);
  const auto r = run("predict --ckpt-mcl " + d + "/mcl.json --ckpt-traj " + d + "/traj.json --start 0,0 --end 0,0",
                     dir.path());
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("hc_mcl_s").get<double>() == 0.0);
  CHECK(j.at("end_time_s").get<double>() == 0.0);
  CHECK(j.at("profile").at("yaw").at("amplitude_dps").get<double>() == 0.0);

  // Swapped checkpoints are rejected by kind.
  const auto swapped = run("predict --ckpt-mcl " + d + "/traj.json --ckpt-traj " + d + "/mcl.json --start 0,0 --end 1,1",
                           dir.path());
  CHECK(swapped.status == 2);
  const auto bad_pose = run("predict --ckpt-mcl " + d + "/mcl.json --ckpt-traj " + d + "/traj.json --start 0 --end 1,1",
                            dir.path());
  CHECK(bad_pose.status == 2);
  const auto train_split = run("evaluate --mode posthoc --data " + d + "/pilot --ckpts " + d + "/mcl.json --out " + d +
                                   "/r",
                               dir.path());
  CHECK(train_split.status == 2);
}

TEST_CASE("distinct exit codes and a machine-readable error line") {
  TempDir dir("cli_errors");
  const std::string d = dir.path().string();

  const auto missing = run("estimate --ckpt " + d + "/none.json --trajectory " + d + "/none.csv --out " + d + "/o.csv",
                           dir.path());
  CHECK(missing.status == 10);
  CHECK(missing.err.rfind("error code=io message=\"", 0) == 0);

  neckmcl::io::write_file(dir / "bad.csv", "time,a,b,c,d\n0,0,0,0,0\n");
  const auto header = run("emg process --in " + d + "/bad.csv --out " + d + "/o.csv", dir.path());
  CHECK(header.status == 11);
  CHECK(header.err.find("code=parse") != std::string::npos);

  const auto cfg = run("--set nope=1 config dump", dir.path());
  CHECK(cfg.status == 12);
  neckmcl::io::write_file(dir / "run.cfg", "eval.stride = 9\n");
  CHECK(run("--config " + d + "/run.cfg config dump", dir.path()).status == 12);

  const auto usage = run("synth gen --protocol sideways --out " + d + "/x", dir.path());
  CHECK(usage.status == 13);
  CHECK(usage.err.rfind("error code=usage", 0) == 0);
  CHECK(run("frobnicate", dir.path()).status == 13);

  neckmcl::io::write_file(dir / "flat.csv", "t_s,l_scm_mv,r_scm_mv,l_sc_mv,r_sc_mv\n");
  for (int i = 0; i < 400; ++i) {
    neckmcl::io::write_file(dir / "flat.csv", read_file(dir / "flat.csv") + std::to_string(i / 2000.0) + ",0,0,0,0\n");
  }
  CHECK(run("emg process --in " + d + "/flat.csv --out " + d + "/o.csv", dir.path()).status == 6);
}

TEST_CASE("help documents every subcommand") {
  TempDir dir("cli_help");
  const auto r = run("--help", dir.path());
  CHECK(r.status == 0);
  for (const char* sub : {"synth", "emg", "train", "estimate", "predict", "scanpath", "evaluate", "selftest", "config"}) {
    CHECK_MESSAGE(r.out.find(sub) != std::string::npos, sub);
  }
  const auto p = run("predict --help", dir.path());
  CHECK(p.status == 0);
  for (const char* flag : {"--ckpt-mcl", "--ckpt-traj", "--start", "--end"}) CHECK(p.out.find(flag) != std::string::npos);
}

TEST_CASE("selftest passes") {
  TempDir dir("cli_selftest");
  const auto r = run("selftest", dir.path());
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}

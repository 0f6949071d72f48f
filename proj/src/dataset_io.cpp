#include "neckmcl/dataset_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "neckmcl/csv.hpp"
#include "neckmcl/error.hpp"

namespace neckmcl::io {

using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

json pose_json(kin::HeadPose p) { return json::array({p.pitch, p.yaw}); }

kin::HeadPose pose_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json profile_json(const traj::ProfilePair& pair) {
  json out = json::object();
  const char* names[2] = {"pitch", "yaw"};
  for (std::size_t a = 0; a < 2; ++a) {
    out[names[a]] = {{"amplitude_dps", pair[a].amplitude},
                     {"center_s", pair[a].center},
                     {"width_s", pair[a].width},
                     {"degenerate", pair[a].degenerate}};
  }
  return out;
}

traj::ProfilePair profile_from(const json& j) {
  traj::ProfilePair pair;
  const char* names[2] = {"pitch", "yaw"};
  for (std::size_t a = 0; a < 2; ++a) {
    const json& g = j.at(names[a]);
    pair[a] = {g.at("amplitude_dps").get<double>(), g.at("center_s").get<double>(), g.at("width_s").get<double>(),
               g.at("degenerate").get<bool>()};
  }
  return pair;
}

json oracle_json(const oracle::OracleConfig& c) {
  return {{"inertia", c.inertia},         {"gravity_gain", c.gravity_gain},   {"pitch_offset_deg", c.pitch_offset},
          {"yaw_gain", c.yaw_gain},       {"weight_pitch", c.weight_pitch},   {"weight_yaw", c.weight_yaw},
          {"baseline", c.baseline},       {"cap", c.cap},                     {"exponent", c.exponent},
          {"sigma0_s", c.sigma0},         {"sigma_slope_s_per_deg", c.sigma_slope},
          {"sigma_jitter", c.sigma_jitter}, {"velocity_noise", c.velocity_noise}};
}

}  // namespace

const char* split_name(oracle::Protocol p) { return p == oracle::Protocol::Pilot ? "train" : "eval"; }

void write_dataset(const std::filesystem::path& dir, const oracle::SyntheticDataset& data,
                   const oracle::OracleConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "sessions", ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  json sessions = json::array();
  for (const auto& s : data.sessions) {
    json files = {{"trajectory", fmt::format("sessions/{}.traj.csv", s.id)},
                  {"mcl", fmt::format("sessions/{}.mcl.csv", s.id)}};
    write_file(dir / files["trajectory"].get<std::string>(), trajectory_csv(s.trajectory));
    write_file(dir / files["mcl"].get<std::string>(), mcl_csv(s.mcl));
    if (s.emg) {
      files["emg"] = fmt::format("sessions/{}.emg.csv", s.id);
      write_file(dir / files["emg"].get<std::string>(), raw_emg_csv(*s.emg));
    }
    sessions.push_back({{"id", s.id},
                        {"participant", s.participant},
                        {"anchor_index", s.anchor_index},
                        {"anchor", pose_json(s.anchor)},
                        {"target", pose_json(s.target)},
                        {"move_begin", s.move_begin},
                        {"move_end", s.move_end},
                        {"seed", s.seed},
                        {"profile", profile_json(s.profile)},
                        {"files", files}});
  }
  json anchors = json::array();
  for (const auto& a : data.anchors) anchors.push_back(pose_json(a));
  json manifest = {{"format_version", kManifestVersion},
                   {"protocol", oracle::to_string(data.protocol)},
                   {"split", split_name(data.protocol)},
                   {"seed", data.seed},
                   {"sample_rate_hz", kin::kModelRate},
                   {"config_hash", oracle::config_hash(cfg)},
                   {"oracle", oracle_json(cfg)},
                   {"anchors", anchors},
                   {"sessions", sessions}};
  write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

oracle::SyntheticDataset read_dataset(const std::filesystem::path& dir, bool load_emg) {
  const std::filesystem::path mpath = dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(read_file(mpath));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("{}: {}", mpath.string(), e.what()));
  }
  try {
    if (manifest.at("format_version").get<int>() != kManifestVersion) {
      throw Error(ErrorCode::Parse, fmt::format("{}: unsupported format_version", mpath.string()));
    }
    oracle::SyntheticDataset data;
    data.protocol = oracle::parse_protocol(manifest.at("protocol").get<std::string>());
    data.seed = manifest.at("seed").get<std::uint64_t>();
    for (const auto& a : manifest.at("anchors")) data.anchors.push_back(pose_from(a));
    for (const auto& js : manifest.at("sessions")) {
      oracle::Session s;
      s.id = js.at("id").get<std::string>();
      s.participant = js.at("participant").get<std::size_t>();
      s.anchor_index = js.at("anchor_index").get<std::size_t>();
      s.anchor = pose_from(js.at("anchor"));
      s.target = pose_from(js.at("target"));
      s.move_begin = js.at("move_begin").get<std::size_t>();
      s.move_end = js.at("move_end").get<std::size_t>();
      s.seed = js.at("seed").get<std::uint64_t>();
      s.profile = profile_from(js.at("profile"));
      const json& files = js.at("files");
      s.trajectory = read_trajectory(dir / files.at("trajectory").get<std::string>());
      s.mcl = read_mcl(dir / files.at("mcl").get<std::string>());
      if (load_emg && files.contains("emg")) s.emg = read_raw_emg(dir / files.at("emg").get<std::string>());
      if (s.trajectory.size() != s.mcl.size() || s.move_end >= s.trajectory.size() || s.move_begin > s.move_end ||
          s.anchor_index >= data.anchors.size()) {
        throw Error(ErrorCode::Parse, fmt::format("{}: session '{}' is inconsistent", mpath.string(), s.id));
      }
      data.sessions.push_back(std::move(s));
    }
    return data;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("{}: malformed manifest: {}", mpath.string(), e.what()));
  }
}

}  // namespace neckmcl::io

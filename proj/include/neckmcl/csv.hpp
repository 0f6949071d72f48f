#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "neckmcl/emg.hpp"
#include "neckmcl/kinematics.hpp"
#include "neckmcl/scanpath.hpp"
#include "neckmcl/trajectory.hpp"

namespace neckmcl::io {

/// Comma-separated table with a required header; fields are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  double number(std::size_t row, std::size_t col) const;
};

/// Parses `text`; a header different from `expected` is a Parse error
/// naming `source`.
CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for tests: whole buffer, then checks the stream.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Shortest representation that parses back to the same double.
std::string format_number(double v);

inline const std::vector<std::string> kTrajectoryHeader{"t_s", "pitch_deg", "yaw_deg"};
inline const std::vector<std::string> kMclHeader{"t_s", "mcl"};
inline const std::vector<std::string> kRawEmgHeader{"t_s", "l_scm_mv", "r_scm_mv", "l_sc_mv", "r_sc_mv"};
inline const std::vector<std::string> kProfileHeader{"axis", "amplitude_dps", "center_s", "width_s"};
inline const std::vector<std::string> kScanPathHeader{"step", "pitch_deg", "yaw_deg", "step_rotation_deg", "hc"};

std::string trajectory_csv(const kin::TimedTrajectory& traj);
std::string mcl_csv(const emg::MclSequence& mcl);
std::string raw_emg_csv(const emg::RawEmgRecord& rec);
std::string profile_csv(const traj::ProfilePair& pair);
std::string scanpath_csv(const scan::ScanPath& path);

/// Sample rate recovered from the time column; rows must be uniformly
/// spaced and increasing.
kin::TimedTrajectory parse_trajectory(const std::string& text, const std::string& source);
emg::MclSequence parse_mcl(const std::string& text, const std::string& source);
emg::RawEmgRecord parse_raw_emg(const std::string& text, const std::string& source);
traj::ProfilePair parse_profile(const std::string& text, const std::string& source);
scan::ScanPath parse_scanpath(const std::string& text, const std::string& source);

kin::TimedTrajectory read_trajectory(const std::filesystem::path& path);
emg::MclSequence read_mcl(const std::filesystem::path& path);
emg::RawEmgRecord read_raw_emg(const std::filesystem::path& path);

}  // namespace neckmcl::io

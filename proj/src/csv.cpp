#include "neckmcl/csv.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "neckmcl/error.hpp"

namespace neckmcl::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    out.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::Parse, fmt::format("{}: '{}' is not a finite number", where, s));
  }
  return v;
}

std::string source_of(const std::filesystem::path& p) { return p.string(); }

double uniform_rate(const std::vector<double>& t, const std::string& source) {
  if (t.size() < 2) throw Error(ErrorCode::Parse, fmt::format("{}: need at least 2 rows to infer a sample rate", source));
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw Error(ErrorCode::Parse, fmt::format("{}: time column is not increasing", source));
  double rate = static_cast<double>(t.size() - 1) / span;
  const double nearest = std::round(rate);
  if (std::abs(rate - nearest) <= 1e-6 * rate) rate = nearest;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expected = t.front() + static_cast<double>(i) / rate;
    if (std::abs(t[i] - expected) > 1e-6 + 1e-9 * std::abs(expected)) {
      throw Error(ErrorCode::Parse, fmt::format("{}: row {} breaks uniform sampling", source, i + 2));
    }
  }
  return rate;
}

}  // namespace

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_double(rows.at(row).at(col), fmt::format("row {} column '{}'", row + 2, header.at(col)));
}

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, fmt::format("{}: empty file", source));
  table.header = split(line);
  if (table.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    throw Error(ErrorCode::Parse, fmt::format("{}: expected header '{}'", source, want));
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line);
    if (fields.size() != expected.size()) {
      throw Error(ErrorCode::Parse, fmt::format("{}: line {} has {} fields, expected {}", source, lineno,
                                                fields.size(), expected.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorCode::Io, fmt::format("failed writing '{}'", path.string()));
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected) {
  return parse_csv(read_file(path), expected, source_of(path));
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::string trajectory_csv(const kin::TimedTrajectory& traj) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t_s,pitch_deg,yaw_deg\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{},{},{}\n", traj.time_at(i), traj.poses[i].pitch, traj.poses[i].yaw);
  }
  return fmt::to_string(buf);
}

std::string mcl_csv(const emg::MclSequence& mcl) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t_s,mcl\n");
  for (std::size_t i = 0; i < mcl.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{},{}\n", static_cast<double>(i) / mcl.sample_rate, mcl.values[i]);
  }
  return fmt::to_string(buf);
}

std::string raw_emg_csv(const emg::RawEmgRecord& rec) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t_s,l_scm_mv,r_scm_mv,l_sc_mv,r_sc_mv\n");
  for (std::size_t i = 0; i < rec.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", static_cast<double>(i) / rec.sample_rate,
                   rec.channels[0][i], rec.channels[1][i], rec.channels[2][i], rec.channels[3][i]);
  }
  return fmt::to_string(buf);
}

std::string profile_csv(const traj::ProfilePair& pair) {
  std::string out = "axis,amplitude_dps,center_s,width_s\n";
  const char* names[2] = {"pitch", "yaw"};
  for (std::size_t a = 0; a < 2; ++a) {
    out += fmt::format("{},{},{},{}\n", names[a], pair[a].amplitude, pair[a].center, pair[a].width);
  }
  return out;
}

std::string scanpath_csv(const scan::ScanPath& path) {
  std::string out = "step,pitch_deg,yaw_deg,step_rotation_deg,hc\n";
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    const double rot = i == 0 ? 0.0 : path.step_rotation[i - 1];
    const double hc = i == 0 ? 0.0 : path.hc[i - 1];
    out += fmt::format("{},{},{},{},{}\n", i, path.poses[i].pitch, path.poses[i].yaw, rot, hc);
  }
  return out;
}

kin::TimedTrajectory parse_trajectory(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, kTrajectoryHeader, source);
  std::vector<double> time;
  kin::TimedTrajectory traj;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    time.push_back(t.number(r, 0));
    traj.poses.push_back({t.number(r, 1), t.number(r, 2)});
  }
  traj.sample_rate = uniform_rate(time, source);
  return traj;
}

emg::MclSequence parse_mcl(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, kMclHeader, source);
  std::vector<double> time;
  emg::MclSequence mcl;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    time.push_back(t.number(r, 0));
    mcl.values.push_back(t.number(r, 1));
  }
  mcl.sample_rate = uniform_rate(time, source);
  return mcl;
}

emg::RawEmgRecord parse_raw_emg(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, kRawEmgHeader, source);
  std::vector<double> time;
  emg::RawEmgRecord rec;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    time.push_back(t.number(r, 0));
    for (std::size_t c = 0; c < emg::kChannels; ++c) rec.channels[c].push_back(t.number(r, c + 1));
  }
  rec.sample_rate = uniform_rate(time, source);
  rec.validate();
  return rec;
}

traj::ProfilePair parse_profile(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, kProfileHeader, source);
  if (t.rows.size() != 2 || t.rows[0][0] != "pitch" || t.rows[1][0] != "yaw") {
    throw Error(ErrorCode::Parse, fmt::format("{}: expected a pitch row and a yaw row", source));
  }
  traj::ProfilePair pair;
  for (std::size_t a = 0; a < 2; ++a) {
    pair[a].amplitude = t.number(a, 1);
    pair[a].center = t.number(a, 2);
    pair[a].width = t.number(a, 3);
    pair[a].degenerate = pair[a].amplitude == 0.0;
  }
  return pair;
}

scan::ScanPath parse_scanpath(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, kScanPathHeader, source);
  scan::ScanPath path;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    path.poses.push_back({t.number(r, 1), t.number(r, 2)});
    if (r == 0) continue;
    path.step_rotation.push_back(t.number(r, 3));
    path.hc.push_back(t.number(r, 4));
    path.adjusted.push_back(false);
  }
  return path;
}

kin::TimedTrajectory read_trajectory(const std::filesystem::path& path) {
  return parse_trajectory(read_file(path), source_of(path));
}

emg::MclSequence read_mcl(const std::filesystem::path& path) { return parse_mcl(read_file(path), source_of(path)); }

emg::RawEmgRecord read_raw_emg(const std::filesystem::path& path) {
  return parse_raw_emg(read_file(path), source_of(path));
}

}  // namespace neckmcl::io

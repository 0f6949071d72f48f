#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neckmcl/error.hpp"
#include "neckmcl/kinematics.hpp"

#include <unistd.h>

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("neckmcl_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline neckmcl::kin::TimedTrajectory make_trajectory(double rate, std::size_t n, auto&& pose_at) {
  neckmcl::kin::TimedTrajectory t;
  t.sample_rate = rate;
  for (std::size_t i = 0; i < n; ++i) t.poses.push_back(pose_at(static_cast<double>(i) / rate));
  return t;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Runs `f` and returns the library error code it raised; fails the
/// enclosing test through the returned optional being empty otherwise.
template <class F>
std::optional<neckmcl::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const neckmcl::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testsupport

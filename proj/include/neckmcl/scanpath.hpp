#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "neckmcl/kinematics.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/rng.hpp"
#include "neckmcl/trajnet.hpp"

namespace neckmcl::scan {

enum class Condition { Max, Rnd, Min };

const char* to_string(Condition c);
Condition parse_condition(const std::string& text);

inline constexpr double kTotalRotation = 900.0;
inline constexpr std::size_t kSteps = 30;
inline constexpr double kMinStep = 5.0;

struct RotationPartition {
  std::vector<double> steps;  ///< degrees
  double total() const;       ///< left-to-right sum
};

/// `steps` uniform draws in [0.5, 1.5] scaled to `total`; steps below
/// `min_step` are clamped and the rest rescaled until none remain. The last
/// step absorbs rounding so the left-to-right sum is exactly `total`.
RotationPartition partition_rotation(Rng& rng, double total = kTotalRotation, std::size_t steps = kSteps,
                                     double min_step = kMinStep);

struct Candidates {
  std::vector<kin::HeadPose> poses;
  double magnitude = 0.0;     ///< radius actually used
  std::size_t halvings = 0;   ///< times the radius was halved to find in-field poses
};

/// 36 poses at 10 degree spacing on the circle of radius `magnitude` around
/// `current`, in angle order starting at +yaw, filtered to the study field.
Candidates candidate_poses(kin::HeadPose current, double magnitude);

/// 6 x 10 grid of 10 degree cells over the study field.
class CoverageGrid {
 public:
  static constexpr std::size_t kRows = 6;
  static constexpr std::size_t kCols = 10;
  static constexpr std::size_t kCells = kRows * kCols;
  /// Segment sampling step used by visit_segment, degrees.
  static constexpr double kSegmentStep = 0.1;

  static std::size_t cell_of(kin::HeadPose pose);

  void visit(kin::HeadPose pose);
  /// Marks every cell the straight segment a -> b passes through.
  void visit_segment(kin::HeadPose a, kin::HeadPose b);
  std::size_t count() const;
  double fraction() const { return static_cast<double>(count()) / static_cast<double>(kCells); }
  bool visited(std::size_t cell) const { return cells_[cell]; }

 private:
  std::array<bool, kCells> cells_{};
};

struct ScanPath {
  Condition condition = Condition::Rnd;
  std::vector<kin::HeadPose> poses;        ///< 31 targets starting at (0, 0)
  std::vector<double> step_rotation;       ///< per step, degrees
  std::vector<double> hc;                  ///< forecast cumulative MCL per step
  std::vector<bool> adjusted;              ///< step radius was halved
  double total_rotation() const;
  double total_hc() const;
};

/// Forecast cumulative MCL for a move.
using HcFunction = std::function<double(kin::HeadPose, kin::HeadPose)>;

/// Greedy generation. Scores: MAX = C + H, RND = C, MIN = C - H, where C is
/// the post-move count of covered cells and H the candidate's forecast
/// divided by the mean forecast over the step's candidates. Ties: lowest
/// candidate index, except RND which draws uniformly among tied candidates.
ScanPath generate(Condition condition, const RotationPartition& partition, const HcFunction& hc, Rng& rng);

ScanPath generate(Condition condition, const RotationPartition& partition, const trajnet::TrajectoryNet& tnet,
                  const mcl::MclNet& mnet, Rng& rng);

/// Fraction of cells covered by the path's poses and the segments between them.
double coverage_report(const ScanPath& path);

struct StudyEntry {
  std::size_t session = 0;
  std::size_t partition = 0;
  Condition condition = Condition::Rnd;
  std::uint64_t partition_seed = 0;
  std::uint64_t tie_seed = 0;
};

/// `partitions` x 3 conditions; condition order within each partition is
/// shuffled with a seed derived from `seed`.
std::vector<StudyEntry> study_manifest(std::uint64_t seed, std::size_t partitions = 6);

/// Seed helpers shared by the CLI and the study manifest.
std::uint64_t partition_seed(std::uint64_t seed, std::size_t partition);
std::uint64_t tie_seed(std::uint64_t seed, std::size_t partition, Condition condition);

}  // namespace neckmcl::scan

#include "neckmcl/scanpath.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "neckmcl/error.hpp"

namespace neckmcl::scan {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::Max: return "max";
    case Condition::Rnd: return "rnd";
    case Condition::Min: return "min";
  }
  return "?";
}

Condition parse_condition(const std::string& text) {
  if (text == "max") return Condition::Max;
  if (text == "rnd") return Condition::Rnd;
  if (text == "min") return Condition::Min;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown condition '{}' (expected max, rnd or min)", text));
}

double RotationPartition::total() const {
  double s = 0.0;
  for (double v : steps) s += v;
  return s;
}

RotationPartition partition_rotation(Rng& rng, double total, std::size_t steps, double min_step) {
  if (steps == 0 || !(total > 0.0) || min_step * static_cast<double>(steps) > total) {
    throw Error(ErrorCode::InvalidInput, "partition_rotation: infeasible total/steps/min_step");
  }
  RotationPartition p;
  p.steps.resize(steps);
  for (double& s : p.steps) s = rng.uniform(0.5, 1.5);
  const auto rescale = [&] {
    double free_sum = 0.0, fixed = 0.0;
    for (double s : p.steps) (s <= min_step ? fixed : free_sum) += s;
    const double factor = (total - fixed) / free_sum;
    for (double& s : p.steps) {
      if (s > min_step) s *= factor;
    }
  };
  double sum = 0.0;
  for (double s : p.steps) sum += s;
  for (double& s : p.steps) s *= total / sum;
  for (int guard = 0; guard < 100; ++guard) {
    bool clamped = false;
    for (double& s : p.steps) {
      if (s < min_step) {
        s = min_step;
        clamped = true;
      }
    }
    if (!clamped) break;
    rescale();
  }
  // The last step absorbs rounding; total - partial is exact when the
  // partial sum lies within a factor two of total.
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < steps; ++i) partial += p.steps[i];
  p.steps.back() = total - partial;
  return p;
}

Candidates candidate_poses(kin::HeadPose current, double magnitude) {
  if (!(magnitude > 0.0)) throw Error(ErrorCode::InvalidInput, "candidate_poses: magnitude must be positive");
  Candidates c;
  c.magnitude = magnitude;
  for (;;) {
    c.poses.clear();
    for (int k = 0; k < 36; ++k) {
      const double theta = static_cast<double>(k) * 10.0 * std::numbers::pi / 180.0;
      const kin::HeadPose pose{current.pitch + c.magnitude * std::sin(theta),
                               current.yaw + c.magnitude * std::cos(theta)};
      if (kin::StudyField::contains(pose, 1e-9)) c.poses.push_back(pose);
    }
    if (!c.poses.empty() || c.magnitude < 1e-6) break;
    c.magnitude *= 0.5;
    ++c.halvings;
  }
  return c;
}

std::size_t CoverageGrid::cell_of(kin::HeadPose pose) {
  const auto idx = [](double v, double lo, std::size_t n) {
    const double f = std::floor((v - lo) / 10.0);
    return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(n - 1)));
  };
  return idx(pose.pitch, kin::StudyField::kPitchMin, kRows) * kCols + idx(pose.yaw, kin::StudyField::kYawMin, kCols);
}

void CoverageGrid::visit(kin::HeadPose pose) { cells_[cell_of(pose)] = true; }

void CoverageGrid::visit_segment(kin::HeadPose a, kin::HeadPose b) {
  const double len = kin::angular_distance(a, b);
  const auto n = static_cast<std::size_t>(std::ceil(len / kSegmentStep));
  for (std::size_t i = 0; i <= n; ++i) {
    const double f = n == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(n);
    visit({a.pitch + f * (b.pitch - a.pitch), a.yaw + f * (b.yaw - a.yaw)});
  }
}

std::size_t CoverageGrid::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), true));
}

double ScanPath::total_rotation() const {
  double s = 0.0;
  for (double v : step_rotation) s += v;
  return s;
}

double ScanPath::total_hc() const {
  double s = 0.0;
  for (double v : hc) s += v;
  return s;
}

ScanPath generate(Condition condition, const RotationPartition& partition, const HcFunction& hc, Rng& rng) {
  ScanPath path;
  path.condition = condition;
  kin::HeadPose current{0.0, 0.0};
  path.poses.push_back(current);
  CoverageGrid grid;
  grid.visit(current);

  for (double step : partition.steps) {
    const Candidates cand = candidate_poses(current, step);
    const std::size_t n = cand.poses.size();
    std::vector<double> coverage(n), forecast(n, 0.0), score(n);
    for (std::size_t i = 0; i < n; ++i) {
      CoverageGrid g = grid;
      g.visit_segment(current, cand.poses[i]);
      coverage[i] = static_cast<double>(g.count());
    }
    if (condition != Condition::Rnd) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += forecast[i] = hc(current, cand.poses[i]);
      mean /= static_cast<double>(n);
      const double sign = condition == Condition::Max ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) score[i] = coverage[i] + (mean > 0.0 ? sign * forecast[i] / mean : 0.0);
    } else {
      score = coverage;
    }
    const double best = *std::max_element(score.begin(), score.end());
    std::size_t pick = 0;
    if (condition == Condition::Rnd) {
      std::vector<std::size_t> tied;
      for (std::size_t i = 0; i < n; ++i) {
        if (score[i] == best) tied.push_back(i);
      }
      pick = tied[rng.below(tied.size())];
    } else {
      while (score[pick] != best) ++pick;
    }
    const kin::HeadPose next = cand.poses[pick];
    path.hc.push_back(condition == Condition::Rnd ? hc(current, next) : forecast[pick]);
    path.step_rotation.push_back(cand.magnitude);
    path.adjusted.push_back(cand.halvings > 0);
    grid.visit_segment(current, next);
    path.poses.push_back(next);
    current = next;
  }
  return path;
}

ScanPath generate(Condition condition, const RotationPartition& partition, const trajnet::TrajectoryNet& tnet,
                  const mcl::MclNet& mnet, Rng& rng) {
  if (!tnet.trained || !mnet.trained) throw Error(ErrorCode::State, "scanpath generate: models are untrained");
  const HcFunction hc = [&](kin::HeadPose a, kin::HeadPose b) { return trajnet::cumulative_mcl(a, b, tnet, mnet); };
  return generate(condition, partition, hc, rng);
}

double coverage_report(const ScanPath& path) {
  CoverageGrid grid;
  if (path.poses.empty()) return 0.0;
  grid.visit(path.poses.front());
  for (std::size_t i = 1; i < path.poses.size(); ++i) grid.visit_segment(path.poses[i - 1], path.poses[i]);
  return grid.fraction();
}

std::uint64_t partition_seed(std::uint64_t seed, std::size_t partition) {
  return derive_seed(seed, "scanpath.partition", partition);
}

std::uint64_t tie_seed(std::uint64_t seed, std::size_t partition, Condition condition) {
  return derive_seed(derive_seed(seed, "scanpath.ties", partition), to_string(condition));
}

std::vector<StudyEntry> study_manifest(std::uint64_t seed, std::size_t partitions) {
  std::vector<StudyEntry> out;
  Rng order_rng(derive_seed(seed, "scanpath.order"));
  for (std::size_t p = 0; p < partitions; ++p) {
    std::array<Condition, 3> conds{Condition::Max, Condition::Rnd, Condition::Min};
    for (std::size_t i = conds.size(); i > 1; --i) std::swap(conds[i - 1], conds[order_rng.below(i)]);
    for (Condition c : conds) {
      out.push_back({out.size(), p, c, partition_seed(seed, p), tie_seed(seed, p, c)});
    }
  }
  return out;
}

}  // namespace neckmcl::scan

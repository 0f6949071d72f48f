#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "neckmcl/oracle.hpp"
#include "neckmcl/scanpath.hpp"
#include "support.hpp"

using namespace neckmcl;
using kin::HeadPose;
using testsupport::error_code_of;

namespace {

// Forecast stand-in: oracle stationary MCL at the target times distance.
scan::HcFunction oracle_hc() {
  static const auto cfg = oracle::calibrate();
  return [](HeadPose a, HeadPose b) { return oracle::oracle_mcl(cfg, b, {0, 0}) * kin::angular_distance(a, b); };
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("partition: exact total, minimum step, determinism") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto p = scan::partition_rotation(rng);
    REQUIRE(p.steps.size() == 30);
    CHECK(p.total() == 900.0);
    CHECK(sum(p.steps) == 900.0);
    for (double s : p.steps) CHECK(s >= 5.0);
    Rng again(seed);
    CHECK(scan::partition_rotation(again).steps == p.steps);
  }
}

TEST_CASE("partition: tight minimum forces clamping") {
  Rng rng(3);
  const auto p = scan::partition_rotation(rng, 900.0, 30, 29.0);
  CHECK(p.total() == 900.0);
  for (double s : p.steps) CHECK(s >= 29.0 - 1e-9);
  Rng r2(4);
  const auto q = scan::partition_rotation(r2, 100.0, 4, 5.0);
  CHECK(q.total() == 100.0);
}

TEST_CASE("candidates: full ring at the centre, angle order from +yaw") {
  const auto c = scan::candidate_poses({0, 0}, 20.0);
  REQUIRE(c.poses.size() == 36);
  CHECK(c.magnitude == 20.0);
  CHECK(c.halvings == 0);
  CHECK(c.poses[0].pitch == doctest::Approx(0.0).scale(1.0));
  CHECK(c.poses[0].yaw == doctest::Approx(20.0));
  for (const auto& p : c.poses) {
    CHECK(kin::StudyField::contains(p));
    CHECK(std::abs(kin::angular_distance(p, {0, 0}) - 20.0) <= 1e-9);
  }
}

TEST_CASE("candidates: corner keeps only in-field poses") {
  const auto c = scan::candidate_poses({30, 50}, 30.0);
  CHECK(c.poses.size() > 0);
  CHECK(c.poses.size() < 36);
  CHECK(c.halvings == 0);
  for (const auto& p : c.poses) {
    CHECK(kin::StudyField::contains(p));
    CHECK(std::abs(kin::angular_distance(p, {30, 50}) - 30.0) <= 1e-9);
  }
}

TEST_CASE("candidates: radius halves until a pose fits") {
  const auto c = scan::candidate_poses({30, 50}, 400.0);
  CHECK(c.halvings > 0);
  CHECK(c.magnitude == 400.0 / std::pow(2.0, static_cast<double>(c.halvings)));
  CHECK_FALSE(c.poses.empty());
  for (const auto& p : c.poses) CHECK(kin::StudyField::contains(p));
}

TEST_CASE("coverage grid cells") {
  using G = scan::CoverageGrid;
  CHECK(G::cell_of({-30, -50}) == 0);
  CHECK(G::cell_of({30, 50}) == G::kCells - 1);
  CHECK(G::cell_of({-25, -35}) == 1);
  CHECK(G::cell_of({-15, -45}) == G::kCols);
  G single;
  single.visit({0, 0});
  CHECK(single.fraction() == doctest::Approx(1.0 / 60.0));
  G all;
  for (double p = -25; p <= 25; p += 10) {
    for (double y = -45; y <= 45; y += 10) all.visit({p, y});
  }
  CHECK(all.fraction() == 1.0);
  G row;
  row.visit_segment({-25, -45}, {-25, 45});
  CHECK(row.count() == 10);
  for (std::size_t c = 0; c < 10; ++c) CHECK(row.visited(c));
}

TEST_CASE("coverage report of a single-pose path") {
  scan::ScanPath path;
  path.poses = {{0, 0}};
  CHECK(scan::coverage_report(path) == doctest::Approx(1.0 / 60.0));
}

TEST_CASE("generation invariants with a stand-in forecast") {
  const auto hc = oracle_hc();
  int ordered = 0;
  const int seeds = 20;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    Rng prng(scan::partition_seed(seed, 0));
    const auto part = scan::partition_rotation(prng);
    std::map<scan::Condition, scan::ScanPath> paths;
    for (auto cond : {scan::Condition::Max, scan::Condition::Rnd, scan::Condition::Min}) {
      Rng rng(scan::tie_seed(seed, 0, cond));
      const auto path = scan::generate(cond, part, hc, rng);
      REQUIRE(path.poses.size() == 31);
      CHECK(path.poses.front() == HeadPose{0, 0});
      REQUIRE(path.hc.size() == 30);
      for (std::size_t t = 0; t < 30; ++t) {
        CHECK(kin::StudyField::contains(path.poses[t + 1]));
        CHECK(std::abs(kin::angular_distance(path.poses[t], path.poses[t + 1]) - path.step_rotation[t]) <= 1e-6);
        if (!path.adjusted[t]) CHECK(path.step_rotation[t] == part.steps[t]);
        CHECK(path.hc[t] == doctest::Approx(hc(path.poses[t], path.poses[t + 1])));
      }
      CHECK(scan::coverage_report(path) >= 0.8);
      paths[cond] = path;
    }
    const auto& mx = paths[scan::Condition::Max];
    const auto& rn = paths[scan::Condition::Rnd];
    const auto& mn = paths[scan::Condition::Min];
    CHECK(mx.total_rotation() == rn.total_rotation());
    CHECK(rn.total_rotation() == mn.total_rotation());
    ordered += mx.total_hc() > rn.total_hc() && rn.total_hc() > mn.total_hc();
  }
  MESSAGE("ordered ", ordered, "/", seeds);
  CHECK(ordered >= 19);
}

TEST_CASE("constant forecast: MAX and MIN reduce to coverage with the same tie rule") {
  const scan::HcFunction flat = [](HeadPose, HeadPose) { return 1.0; };
  Rng prng(11);
  const auto part = scan::partition_rotation(prng);
  Rng r1(1), r2(2);
  const auto mx = scan::generate(scan::Condition::Max, part, flat, r1);
  const auto mn = scan::generate(scan::Condition::Min, part, flat, r2);
  CHECK(mx.poses == mn.poses);
}

TEST_CASE("RND is reproducible from its tie seed") {
  const auto hc = oracle_hc();
  Rng prng(5);
  const auto part = scan::partition_rotation(prng);
  Rng a(9), b(9);
  CHECK(scan::generate(scan::Condition::Rnd, part, hc, a).poses == scan::generate(scan::Condition::Rnd, part, hc, b).poses);
}

TEST_CASE("study manifest: 6 partitions by 3 conditions") {
  const auto m = scan::study_manifest(42);
  REQUIRE(m.size() == 18);
  std::map<std::size_t, std::set<scan::Condition>> by_partition;
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i].session == i);
    by_partition[m[i].partition].insert(m[i].condition);
    CHECK(m[i].partition_seed == scan::partition_seed(42, m[i].partition));
    CHECK(m[i].tie_seed == scan::tie_seed(42, m[i].partition, m[i].condition));
  }
  CHECK(by_partition.size() == 6);
  for (const auto& [p, conds] : by_partition) CHECK(conds.size() == 3);
  CHECK(scan::study_manifest(42).front().condition == m.front().condition);
}

TEST_CASE("condition names") {
  CHECK(std::string(scan::to_string(scan::Condition::Max)) == "max");
  CHECK(scan::parse_condition("min") == scan::Condition::Min);
  CHECK(error_code_of([] { scan::parse_condition("median"); }) == ErrorCode::InvalidInput);
}

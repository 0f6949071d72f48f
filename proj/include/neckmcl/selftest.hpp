#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace neckmcl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Central-difference gradient checks for every layer type and both
/// composed networks, max relative error below `tolerance`.
std::vector<CheckResult> gradient_checks(std::uint64_t seed = 1, double tolerance = 1e-4);

/// Hand-computed metric examples, compared within 1e-9.
std::vector<CheckResult> metric_examples();

}  // namespace neckmcl

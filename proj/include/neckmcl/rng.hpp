#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace neckmcl {

/// splitmix64 step; used for seeding and for deriving per-component seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent stream seed from a master seed and a label.
/// The label is hashed with 64-bit FNV-1a and mixed through splitmix64, so
/// the derivation is stable across platforms and standard libraries.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
///
/// All randomness in the library flows through this generator. Distribution
/// helpers are implemented here rather than with <random> distributions,
/// whose output is implementation-defined, so that streams are identical
/// across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via the Box-Muller transform (spare value cached).
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace neckmcl

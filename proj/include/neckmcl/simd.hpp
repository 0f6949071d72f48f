#pragma once

// Dense double-precision kernels used by the network layers.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled when the toolchain supports it and selected at runtime after a
// cpuid probe. NECKMCL_SIMD=scalar|avx2|auto in the environment overrides the
// choice at first use. The variants differ only in summation order, so they
// agree to rounding, not bit-for-bit; a single process always uses one table.

#include <cstddef>
#include <span>
#include <string_view>

namespace neckmcl::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;

bool cpu_supports_avx2() noexcept;

/// Table currently used by the dispatching wrappers below.
const KernelTable& active() noexcept;
/// Forces a variant; falls back to scalar if the request is unavailable.
/// Not thread-safe with concurrent kernel calls; intended for tests/tools.
void select(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) noexcept {
  return active().sum(x.data(), x.size());
}
inline double sum_sq(std::span<const double> x) noexcept {
  return active().sum_sq(x.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) noexcept {
  active().scale(alpha, x.data(), x.size());
}

}  // namespace neckmcl::simd

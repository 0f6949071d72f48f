#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "neckmcl/error.hpp"
#include "neckmcl/rng.hpp"
#include "neckmcl/simd.hpp"

using namespace neckmcl;

namespace {

// Textbook xoshiro256** used as an independent reference.
struct RefXoshiro {
  std::array<std::uint64_t, 4> s;
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
};

}  // namespace

TEST_CASE("splitmix64 published vector") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("xoshiro256** matches the reference stream") {
  RefXoshiro small{{1, 2, 3, 4}};
  CHECK(small.next() == 11520ULL);
  CHECK(small.next() == 0ULL);

  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
    std::uint64_t st = seed;
    RefXoshiro ref{{splitmix64(st), splitmix64(st), splitmix64(st), splitmix64(st)}};
    Rng rng(seed);
    for (int i = 0; i < 100; ++i) CHECK(rng() == ref.next());
  }
}

TEST_CASE("derive_seed is stable and label sensitive") {
  CHECK(derive_seed(7, "a") == derive_seed(7, "a"));
  CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
  CHECK(derive_seed(7, "a") != derive_seed(8, "a"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, "session", i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform, below and normal stay in range with sane moments") {
  Rng rng(11);
  double sum = 0.0, sum_sq = 0.0;
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++counts[k];
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.03);
  const double v = rng.uniform(-3.0, -1.0);
  CHECK_UNARY(v >= -3.0 && v < -1.0);
}

TEST_CASE("error codes have distinct names and exit statuses") {
  const std::array codes{ErrorCode::InvalidInput,       ErrorCode::Shape,
                         ErrorCode::State,              ErrorCode::DegenerateChannel,
                         ErrorCode::DegenerateSession,  ErrorCode::DegenerateRange,
                         ErrorCode::DegenerateVariance, ErrorCode::CalibrationFailure,
                         ErrorCode::Io,                 ErrorCode::Parse,
                         ErrorCode::Config};
  std::set<std::string_view> names;
  std::set<int> statuses;
  for (auto c : codes) {
    names.insert(to_string(c));
    statuses.insert(exit_status(c));
    CHECK(exit_status(c) > 1);
  }
  CHECK(names.size() == codes.size());
  CHECK(statuses.size() == codes.size());
  const Error e(ErrorCode::Parse, "bad header");
  CHECK(e.code() == ErrorCode::Parse);
  CHECK(std::string(e.what()) == "bad header");
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
  const auto& ref = simd::scalar_table();
  const auto* avx = simd::avx2_table();
  if (avx == nullptr || !simd::cpu_supports_avx2()) {
    MESSAGE("AVX2 variant unavailable; only the scalar table is exercised");
    return;
  }
  Rng rng(5);
  for (std::size_t n = 0; n < 70; ++n) {
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.uniform(-2, 2);
    for (auto& v : b) v = rng.uniform(-2, 2);
    double mag = 1.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);

    CHECK(avx->dot(a.data(), b.data(), n) == doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-14 * mag));
    CHECK(avx->sum(a.data(), n) == doctest::Approx(ref.sum(a.data(), n)).epsilon(1e-13));
    CHECK(avx->sum_sq(a.data(), n) == doctest::Approx(ref.sum_sq(a.data(), n)).epsilon(1e-13));

    auto y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    avx->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15));

    auto s1 = a, s2 = a;
    ref.scale(-1.5, s1.data(), n);
    avx->scale(-1.5, s2.data(), n);
    CHECK(s1 == s2);
  }
}

TEST_CASE("scalar kernels against hand values") {
  const auto& k = simd::scalar_table();
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(k.dot(a.data(), b.data(), 5) == 35.0);
  CHECK(k.sum(a.data(), 5) == 15.0);
  CHECK(k.sum_sq(a.data(), 5) == 55.0);
  CHECK(k.dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("dispatch can be forced and restored") {
  const auto original = simd::active().isa;
  simd::select(simd::Isa::Scalar);
  CHECK(simd::active().isa == simd::Isa::Scalar);
  const std::vector<double> v{1.0, 2.0, 2.0};
  CHECK(simd::sum_sq(v) == 9.0);
  simd::select(original);
  CHECK(simd::active().isa == original);
}

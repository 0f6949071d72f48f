#include <atomic>
#include <cstdlib>
#include <string_view>

#include "neckmcl/simd.hpp"

namespace neckmcl::simd {

#if defined(NECKMCL_WITH_AVX2)
const KernelTable* avx2_table_impl() noexcept;
#endif

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* initial_table() noexcept {
  const KernelTable* best = avx2_table() != nullptr && cpu_supports_avx2() ? avx2_table()
                                                                            : &scalar_table();
  if (const char* env = std::getenv("NECKMCL_SIMD")) {
    const std::string_view choice(env);
    if (choice == "scalar") return &scalar_table();
  }
  return best;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

const KernelTable* avx2_table() noexcept {
#if defined(NECKMCL_WITH_AVX2)
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() noexcept {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    const KernelTable* chosen = initial_table();
    const KernelTable* expected = nullptr;
    g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
    table = g_active.load(std::memory_order_acquire);
  }
  return *table;
}

void select(Isa isa) noexcept {
  const KernelTable* table = &scalar_table();
  if (isa == Isa::Avx2 && avx2_table() != nullptr && cpu_supports_avx2()) table = avx2_table();
  g_active.store(table, std::memory_order_release);
}

}  // namespace neckmcl::simd

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "maldens/simd/kernels.hpp"

namespace maldens::simd {
namespace {

const KernelTable* pick_default() noexcept {
  const char* env = std::getenv("MALDENS_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return &scalar_table();
  if (const KernelTable* t = avx2_table(); t && cpu_supports_avx2()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

bool cpu_supports_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) noexcept {
  if (isa == Isa::scalar) {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  const KernelTable* t = avx2_table();
  if (!t || !cpu_supports_avx2()) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace maldens::simd

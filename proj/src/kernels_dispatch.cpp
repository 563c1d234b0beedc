#include <atomic>

#include "lsc/kernels.hpp"

namespace lsc::kern {
namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops* table = [] {
    const Ops* t = detail::avx2_table();
    return (t != nullptr && cpu_has_avx2_fma()) ? t : nullptr;
  }();
  return table;
}

const Ops& active() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return scalar_ops();
  const Ops* a = avx2_ops();
  return a != nullptr ? *a : scalar_ops();
}

bool force_scalar(bool on) {
  return g_force_scalar.exchange(on, std::memory_order_relaxed);
}

}  // namespace lsc::kern

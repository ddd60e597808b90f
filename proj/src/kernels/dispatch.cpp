#include <atomic>

#include "lprobust/kernels.hpp"

namespace lprobust::kernels {

namespace {

// -1: automatic, otherwise static_cast<int>(Isa).
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(LPROBUST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
  }
  return false;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) {
    const auto isa = static_cast<Isa>(forced);
    return isa_available(isa) ? isa : Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

void force_isa(std::optional<Isa> isa) {
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

double penalty_sum(const PackedPairs& pairs, const AffineMap& map,
                   const PenaltyParams& pen) {
#if defined(LPROBUST_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return penalty_sum_avx2(pairs, map, pen);
#endif
  return penalty_sum_scalar(pairs, map, pen);
}

}  // namespace lprobust::kernels

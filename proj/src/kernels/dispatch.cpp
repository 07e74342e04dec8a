#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ropbench/error.hpp"
#include "ropbench/kernels.hpp"

namespace ropbench::kernels {

namespace {

SimdLevel detect() {
  if (const char* env = std::getenv("ROPBENCH_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return SimdLevel::Scalar;
  }
  return avx2_supported() ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> slot{detect()};
  return slot;
}

inline bool use_avx2(const PrimeField& f) {
#if defined(ROPBENCH_HAVE_AVX2)
  return f.is_mersenne61() && level_slot().load(std::memory_order_relaxed) == SimdLevel::Avx2;
#else
  (void)f;
  return false;
#endif
}

}  // namespace

bool avx2_supported() {
#if defined(ROPBENCH_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

SimdLevel active_level() { return level_slot().load(); }

void set_level(SimdLevel level) {
  if (level == SimdLevel::Avx2 && !avx2_supported()) {
    throw InvalidParamsError("AVX2 kernels requested but not available");
  }
  level_slot().store(level);
}

const char* level_name(SimdLevel level) { return level == SimdLevel::Avx2 ? "avx2" : "scalar"; }

void sub_scaled(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c) {
#if defined(ROPBENCH_HAVE_AVX2)
  if (use_avx2(f)) return avx2::sub_scaled(dst, src, c);
#endif
  scalar::sub_scaled(f, dst, src, c);
}

void scale(const PrimeField& f, std::span<FieldElem> dst, FieldElem c) {
#if defined(ROPBENCH_HAVE_AVX2)
  if (use_avx2(f)) return avx2::scale(dst, c);
#endif
  scalar::scale(f, dst, c);
}

void add(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src) {
#if defined(ROPBENCH_HAVE_AVX2)
  if (use_avx2(f)) return avx2::add(dst, src);
#endif
  scalar::add(f, dst, src);
}

void mul(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src) {
#if defined(ROPBENCH_HAVE_AVX2)
  if (use_avx2(f)) return avx2::mul(dst, src);
#endif
  scalar::mul(f, dst, src);
}

}  // namespace ropbench::kernels

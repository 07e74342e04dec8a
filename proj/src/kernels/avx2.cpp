#include <immintrin.h>

#include <cassert>

#include "ropbench/kernels.hpp"

// Lane-parallel arithmetic mod 2^61 - 1 on four 64-bit lanes. Inputs are
// assumed reduced (< P); every helper returns reduced values.
namespace ropbench::kernels::avx2 {

namespace {

// Built on use rather than as namespace-scope constants, so that no AVX2
// instruction runs during static initialization on machines without it.
inline __m256i vp() { return _mm256_set1_epi64x(static_cast<long long>(kMersenne61)); }
inline __m256i vlow29() { return _mm256_set1_epi64x((1ll << 29) - 1); }

inline __m256i load(const FieldElem* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(FieldElem* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

// x in [0, 2P) -> x mod P. Values stay below 2^63 so the signed compare works.
inline __m256i cond_sub(__m256i x) {
  __m256i ge = _mm256_cmpgt_epi64(x, _mm256_sub_epi64(vp(), _mm256_set1_epi64x(1)));
  return _mm256_sub_epi64(x, _mm256_and_si256(ge, vp()));
}

inline __m256i add_mod(__m256i a, __m256i b) { return cond_sub(_mm256_add_epi64(a, b)); }

inline __m256i mul_mod(__m256i a, __m256i b) {
  __m256i a_hi = _mm256_srli_epi64(a, 32);
  __m256i b_hi = _mm256_srli_epi64(b, 32);
  __m256i ll = _mm256_mul_epu32(a, b);        // < 2^64
  __m256i lh = _mm256_mul_epu32(a, b_hi);     // < 2^61
  __m256i hl = _mm256_mul_epu32(a_hi, b);     // < 2^61
  __m256i hh = _mm256_mul_epu32(a_hi, b_hi);  // < 2^58
  __m256i mid = _mm256_add_epi64(lh, hl);     // < 2^62

  // a*b = hh*2^64 + mid*2^32 + ll, and 2^61 = 1 (mod P)
  __m256i t_hh = _mm256_slli_epi64(hh, 3);                                     // < 2^61
  __m256i t_mid = _mm256_add_epi64(_mm256_srli_epi64(mid, 29),                 // < 2^33
                                   _mm256_slli_epi64(_mm256_and_si256(mid, vlow29()), 32));  // < 2^61
  __m256i t_ll = _mm256_add_epi64(_mm256_and_si256(ll, vp()), _mm256_srli_epi64(ll, 61));    // < 2^61 + 8
  __m256i s = _mm256_add_epi64(_mm256_add_epi64(t_hh, t_mid), t_ll);          // < 2^63
  s = _mm256_add_epi64(_mm256_and_si256(s, vp()), _mm256_srli_epi64(s, 61));    // < 2^61 + 4
  return cond_sub(s);
}

}  // namespace

void sub_scaled(std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c) {
  assert(dst.size() == src.size());
  const PrimeField f;
  const __m256i vc = _mm256_set1_epi64x(static_cast<long long>(c.value));
  std::size_t i = 0;
  for (; i + 4 <= dst.size(); i += 4) {
    __m256i prod = mul_mod(vc, load(&src[i]));
    // d - prod + P lies in (0, 2P)
    __m256i r = _mm256_add_epi64(_mm256_sub_epi64(load(&dst[i]), prod), vp());
    store(&dst[i], cond_sub(r));
  }
  for (; i < dst.size(); ++i) dst[i] = f.sub(dst[i], f.mul(c, src[i]));
}

void scale(std::span<FieldElem> dst, FieldElem c) {
  const PrimeField f;
  const __m256i vc = _mm256_set1_epi64x(static_cast<long long>(c.value));
  std::size_t i = 0;
  for (; i + 4 <= dst.size(); i += 4) store(&dst[i], mul_mod(load(&dst[i]), vc));
  for (; i < dst.size(); ++i) dst[i] = f.mul(dst[i], c);
}

void add(std::span<FieldElem> dst, std::span<const FieldElem> src) {
  assert(dst.size() == src.size());
  const PrimeField f;
  std::size_t i = 0;
  for (; i + 4 <= dst.size(); i += 4) store(&dst[i], add_mod(load(&dst[i]), load(&src[i])));
  for (; i < dst.size(); ++i) dst[i] = f.add(dst[i], src[i]);
}

void mul(std::span<FieldElem> dst, std::span<const FieldElem> src) {
  assert(dst.size() == src.size());
  const PrimeField f;
  std::size_t i = 0;
  for (; i + 4 <= dst.size(); i += 4) store(&dst[i], mul_mod(load(&dst[i]), load(&src[i])));
  for (; i < dst.size(); ++i) dst[i] = f.mul(dst[i], src[i]);
}

}  // namespace ropbench::kernels::avx2

#pragma once

#include <span>

#include "ropbench/field.hpp"

// Vector kernels over F_p used by row elimination and batched evaluation.
// The AVX2 variants only cover p = 2^61 - 1; every other modulus (and every
// machine without AVX2) runs the scalar reference versions. Dispatch happens
// per call on the process-wide SIMD level.
namespace ropbench::kernels {

enum class SimdLevel { Scalar, Avx2 };

bool avx2_supported();
// Level detected at startup, lowered to Scalar if ROPBENCH_SIMD=scalar.
SimdLevel active_level();
// Override for tests; requesting Avx2 on a machine without it throws.
void set_level(SimdLevel level);
const char* level_name(SimdLevel level);

// dst[i] -= c * src[i]
void sub_scaled(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c);
// dst[i] *= c
void scale(const PrimeField& f, std::span<FieldElem> dst, FieldElem c);
// dst[i] += src[i]
void add(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src);
// dst[i] *= src[i]
void mul(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src);

namespace scalar {
void sub_scaled(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c);
void scale(const PrimeField& f, std::span<FieldElem> dst, FieldElem c);
void add(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src);
void mul(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src);
}  // namespace scalar

#if defined(ROPBENCH_HAVE_AVX2)
// Mersenne-61 only. Callers must check avx2_supported().
namespace avx2 {
void sub_scaled(std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c);
void scale(std::span<FieldElem> dst, FieldElem c);
void add(std::span<FieldElem> dst, std::span<const FieldElem> src);
void mul(std::span<FieldElem> dst, std::span<const FieldElem> src);
}  // namespace avx2
#endif

}  // namespace ropbench::kernels

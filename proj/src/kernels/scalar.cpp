#include <cassert>

#include "ropbench/kernels.hpp"

namespace ropbench::kernels::scalar {

void sub_scaled(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src, FieldElem c) {
  assert(dst.size() == src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.sub(dst[i], f.mul(c, src[i]));
}

void scale(const PrimeField& f, std::span<FieldElem> dst, FieldElem c) {
  for (auto& x : dst) x = f.mul(x, c);
}

void add(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src) {
  assert(dst.size() == src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.add(dst[i], src[i]);
}

void mul(const PrimeField& f, std::span<FieldElem> dst, std::span<const FieldElem> src) {
  assert(dst.size() == src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.mul(dst[i], src[i]);
}

}  // namespace ropbench::kernels::scalar

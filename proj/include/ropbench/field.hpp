#pragma once

#include <compare>
#include <cstdint>

namespace ropbench {

// A residue modulo the prime of some PrimeField. The value is kept reduced;
// arithmetic goes through the owning field.
struct FieldElem {
  std::uint64_t value = 0;

  friend constexpr bool operator==(FieldElem, FieldElem) = default;
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

bool is_prime(std::uint64_t n);

// Prime field F_p with p < 2^63. The default modulus is 2^61 - 1, which gets a
// dedicated reduction path (and AVX2 kernels, see kernels.hpp).
class PrimeField {
 public:
  constexpr PrimeField() = default;
  explicit PrimeField(std::uint64_t modulus);

  constexpr std::uint64_t modulus() const { return p_; }
  constexpr bool is_mersenne61() const { return p_ == kMersenne61; }

  FieldElem zero() const { return {0}; }
  FieldElem one() const { return {1 % p_}; }

  FieldElem from_u64(std::uint64_t v) const { return {v % p_}; }
  FieldElem from_i64(std::int64_t v) const;

  FieldElem add(FieldElem a, FieldElem b) const {
    std::uint64_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElem sub(FieldElem a, FieldElem b) const {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElem neg(FieldElem a) const { return {a.value == 0 ? 0 : p_ - a.value}; }

  FieldElem mul(FieldElem a, FieldElem b) const {
    unsigned __int128 prod = static_cast<unsigned __int128>(a.value) * b.value;
    if (is_mersenne61()) {
      std::uint64_t lo = static_cast<std::uint64_t>(prod) & kMersenne61;
      std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
      std::uint64_t s = lo + hi;
      return {s >= kMersenne61 ? s - kMersenne61 : s};
    }
    return {static_cast<std::uint64_t>(prod % p_)};
  }

  FieldElem pow(FieldElem base, std::uint64_t exponent) const;
  // Multiplicative inverse; a must be nonzero.
  FieldElem inv(FieldElem a) const;

  friend constexpr bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_ = kMersenne61;
};

}  // namespace ropbench

#include "ropbench/field.hpp"

#include "ropbench/error.hpp"

namespace ropbench {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
  if (modulus >= (std::uint64_t{1} << 63)) {
    throw InvalidParamsError("field modulus must be below 2^63");
  }
  if (!is_prime(modulus)) {
    throw InvalidParamsError("field modulus " + std::to_string(modulus) + " is not prime");
  }
}

FieldElem PrimeField::from_i64(std::int64_t v) const {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
  // -(v) without overflow on INT64_MIN
  std::uint64_t mag = static_cast<std::uint64_t>(-(v + 1)) + 1;
  return neg(from_u64(mag));
}

FieldElem PrimeField::pow(FieldElem base, std::uint64_t exponent) const {
  FieldElem r = one();
  while (exponent) {
    if (exponent & 1) r = mul(r, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return r;
}

FieldElem PrimeField::inv(FieldElem a) const {
  if (a.value == 0) throw PreconditionError("inverse of zero");
  return pow(a, p_ - 2);
}

}  // namespace ropbench

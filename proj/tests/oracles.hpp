#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the Var and Formula data types: polynomials are plain
// maps, rank is a separate elimination with 128-bit products, permanents and
// matchings are brute force over permutations.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "ropbench/formula.hpp"
#include "ropbench/poly.hpp"
#include "ropbench/var.hpp"

namespace oracle {

using ropbench::Var;

inline constexpr std::uint64_t P = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t addm(std::uint64_t a, std::uint64_t b) { return (a + b) % P; }
inline std::uint64_t mulm(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % P);
}
inline std::uint64_t powm(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mulm(a, a)) {
    if (e & 1) r = mulm(r, a);
  }
  return r;
}
inline std::uint64_t invm(std::uint64_t a) { return powm(a, P - 2); }

// Monomial: variable -> exponent (no zero exponents).
using Mono = std::map<Var, int>;
using Poly = std::map<Mono, std::uint64_t>;

inline void add_term(Poly& p, const Mono& m, std::uint64_t c) {
  std::uint64_t& slot = p[m];
  slot = addm(slot, c);
  if (slot == 0) p.erase(m);
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b) add_term(r, m, c);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Mono m = ma;
      for (const auto& [v, e] : mb) m[v] += e;
      add_term(r, m, mulm(ca, cb));
    }
  }
  return r;
}

inline Poly constant(std::uint64_t c) {
  Poly p;
  if (c % P) p[Mono{}] = c % P;
  return p;
}

inline Poly variable(const Var& v) { return Poly{{Mono{{v, 1}}, 1}}; }

// Naive recursive expansion of a formula over Mersenne-61.
inline Poly expand(const ropbench::Formula& f, ropbench::NodeId id) {
  const auto& n = f.node(id);
  switch (n.op) {
    case ropbench::Op::Variable: return variable(n.var);
    case ropbench::Op::Constant: return constant(n.value.value);
    case ropbench::Op::Add: return add(expand(f, n.left), expand(f, n.right));
    case ropbench::Op::Mul: return mul(expand(f, n.left), expand(f, n.right));
  }
  return {};
}
inline Poly expand(const ropbench::Formula& f) { return expand(f, f.root()); }

inline Poly from_sparse(const ropbench::SparsePoly& s) {
  Poly p;
  for (std::size_t t = 0; t < s.term_count(); ++t) {
    Mono m;
    auto e = s.exponents(t);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i]) m[s.roster()[i]] = e[i];
    }
    add_term(p, m, s.coeff(t).value);
  }
  return p;
}

inline ropbench::SparsePoly to_sparse(const Poly& p) {
  std::set<Var> vs;
  for (const auto& [m, c] : p) {
    for (const auto& [v, e] : m) vs.insert(v);
  }
  std::vector<Var> roster(vs.begin(), vs.end());
  std::vector<std::uint8_t> exps;
  std::vector<ropbench::FieldElem> coeffs;
  for (const auto& [m, c] : p) {
    for (const Var& v : roster) {
      auto it = m.find(v);
      exps.push_back(it == m.end() ? 0 : static_cast<std::uint8_t>(it->second));
    }
    coeffs.push_back({c});
  }
  return ropbench::SparsePoly::from_terms(ropbench::PrimeField{}, roster, exps, coeffs);
}

// Rank by Gauss-Jordan elimination over Mersenne-61.
inline std::size_t rank(std::vector<std::vector<std::uint64_t>> a) {
  std::size_t r = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const std::uint64_t inv = invm(a[r][c]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::uint64_t factor = mulm(a[i][c], inv);
      for (std::size_t k = c; k < cols; ++k) a[i][k] = addm(a[i][k], P - mulm(factor, a[r][k]));
    }
    ++r;
  }
  return r;
}

// Partial derivative matrix by definition: rows are subsets of the Y
// variables, columns subsets of the Z variables, entry the coefficient of the
// product monomial. The polynomial must be multilinear in Y/Z only.
inline std::vector<std::vector<std::uint64_t>> pd_matrix(const Poly& p) {
  std::vector<Var> ys, zs;
  for (const auto& [m, c] : p) {
    for (const auto& [v, e] : m) {
      auto& side = v.side == ropbench::Side::Y ? ys : zs;
      if (std::find(side.begin(), side.end(), v) == side.end()) side.push_back(v);
    }
  }
  std::sort(ys.begin(), ys.end());
  std::sort(zs.begin(), zs.end());
  std::vector<std::vector<std::uint64_t>> M(std::size_t{1} << ys.size(),
                                            std::vector<std::uint64_t>(std::size_t{1} << zs.size(), 0));
  for (const auto& [m, c] : p) {
    std::size_t r = 0, col = 0;
    for (const auto& [v, e] : m) {
      if (v.side == ropbench::Side::Y) {
        r |= std::size_t{1} << (std::find(ys.begin(), ys.end(), v) - ys.begin());
      } else {
        col |= std::size_t{1} << (std::find(zs.begin(), zs.end(), v) - zs.begin());
      }
    }
    M[r][col] = c;
  }
  return M;
}

inline std::size_t pd_rank(const Poly& p) { return p.empty() ? 0 : rank(pd_matrix(p)); }

// Permanent of a small integer matrix over all n! permutations.
inline std::int64_t permanent(const std::vector<std::int64_t>& a, std::size_t n) {
  std::vector<std::size_t> pi(n);
  std::iota(pi.begin(), pi.end(), 0);
  std::int64_t total = 0;
  do {
    std::int64_t prod = 1;
    for (std::size_t i = 0; i < n && prod; ++i) prod *= a[i * n + pi[i]];
    total += prod;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return total;
}

}  // namespace oracle

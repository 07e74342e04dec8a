#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ropbench/field.hpp"
#include "ropbench/formula.hpp"
#include "ropbench/var.hpp"

namespace ropbench {

class Partition;

inline constexpr std::size_t kDefaultTermCap = std::size_t{1} << 22;

// Sparse polynomial in canonical form: a sorted roster of the variables that
// actually occur, and one exponent row (one byte per roster variable) plus a
// nonzero coefficient per term. Rows are strictly increasing in byte order.
// Since Var orders by side first, the roster lists X, then Y, then Z.
class SparsePoly {
 public:
  explicit SparsePoly(PrimeField field = {}) : field_(field) {}

  static SparsePoly constant(const PrimeField& field, FieldElem c);
  static SparsePoly variable(const PrimeField& field, const Var& v);
  // Canonicalizes arbitrary input: merges duplicate rows, drops zero terms and
  // unused roster variables. `exps` is terms x roster, row-major.
  static SparsePoly from_terms(const PrimeField& field, std::vector<Var> roster, std::vector<std::uint8_t> exps,
                               std::vector<FieldElem> coeffs);

  const PrimeField& field() const { return field_; }
  const std::vector<Var>& roster() const { return roster_; }
  std::size_t term_count() const { return coeffs_.size(); }
  FieldElem coeff(std::size_t term) const { return coeffs_[term]; }
  std::span<const std::uint8_t> exponents(std::size_t term) const {
    return {exps_.data() + term * roster_.size(), roster_.size()};
  }
  const std::vector<std::uint8_t>& exponent_data() const { return exps_; }
  const std::vector<FieldElem>& coeffs() const { return coeffs_; }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return roster_.empty(); }
  FieldElem constant_term() const;
  bool is_multilinear() const;
  std::size_t count_side(Side s) const;

  FieldElem evaluate(const std::function<FieldElem(const Var&)>& point) const;

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
    return a.field_ == b.field_ && a.roster_ == b.roster_ && a.exps_ == b.exps_ && a.coeffs_ == b.coeffs_;
  }

 private:
  PrimeField field_;
  std::vector<Var> roster_;
  std::vector<std::uint8_t> exps_;
  std::vector<FieldElem> coeffs_;
};

// Throws BlowUpError if the result would exceed `cap` terms.
SparsePoly poly_add(const SparsePoly& p, const SparsePoly& q, std::size_t cap = kDefaultTermCap);
SparsePoly poly_neg(const SparsePoly& p);
// Throws BlowUpError if the number of term products exceeds `cap`, and
// CapError if an exponent would exceed 255.
SparsePoly poly_mul(const SparsePoly& p, const SparsePoly& q, std::size_t cap = kDefaultTermCap);

// Expanded polynomial of a formula, folding constants at every gate.
SparsePoly expand(const Formula& f, std::size_t cap = kDefaultTermCap);
SparsePoly expand_subtree(const Formula& f, NodeId id, std::size_t cap = kDefaultTermCap);

bool is_multilinear(const SparsePoly& p);

// Substitutes every roster variable by its target (y_k, z_k, 0 or 1).
// Throws UnassignedVariableError if a roster variable is not mapped.
SparsePoly apply_partition(const SparsePoly& p, const Partition& phi);

// First line: JSON header with the field and the roster split by side. Then
// one line per term: "coeff y-mask z-mask e1 e2 ...", masks in hex with bit i
// standing for the i-th variable of that side, exponents in roster order.
std::string dump(const SparsePoly& p);

}  // namespace ropbench

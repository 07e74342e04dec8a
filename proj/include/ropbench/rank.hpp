#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ropbench/field.hpp"
#include "ropbench/formula.hpp"
#include "ropbench/poly.hpp"
#include "ropbench/var.hpp"

namespace ropbench {

// Rank of a dense row-major matrix over the field; `data` is destroyed.
std::size_t rank_in_place(const PrimeField& f, std::vector<FieldElem>& data, std::size_t rows, std::size_t cols);

// Dense matrix with rows indexed by multilinear monomials over a Y-roster and
// columns by monomials over a Z-roster. Row r is the monomial whose variables
// are the set bits of r (bit i = i-th roster variable); likewise columns.
class RankMatrix {
 public:
  RankMatrix() = default;
  RankMatrix(PrimeField field, std::vector<Var> y_roster, std::vector<Var> z_roster);

  const PrimeField& field() const { return field_; }
  const std::vector<Var>& y_roster() const { return y_; }
  const std::vector<Var>& z_roster() const { return z_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElem at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, FieldElem v) {
    data_[r * cols_ + c] = v;
    rank_.reset();
  }
  void add_to(std::size_t r, std::size_t c, FieldElem v) { set(r, c, field_.add(at(r, c), v)); }
  const std::vector<FieldElem>& data() const { return data_; }

  // Exact rank by Gaussian elimination; cached until the next mutation.
  // Not safe to call concurrently on one object before the first call returns.
  std::size_t rank() const;

  friend bool operator==(const RankMatrix& a, const RankMatrix& b) {
    return a.field_ == b.field_ && a.y_ == b.y_ && a.z_ == b.z_ && a.data_ == b.data_;
  }

 private:
  PrimeField field_;
  std::vector<Var> y_, z_;
  std::size_t rows_ = 1, cols_ = 1;
  std::vector<FieldElem> data_{FieldElem{}};
  mutable std::optional<std::size_t> rank_;
};

struct MatrixCaps {
  std::size_t max_y = 12;
  std::size_t max_z = 12;
};

// Exact partial derivative matrix of a multilinear polynomial in Y and Z
// variables. With explicit rosters, they must contain the polynomial's
// variables of each side (sorted); the default rosters are the variables that
// occur. Throws NonMultilinearError, CapError, PreconditionError (X variables).
RankMatrix build_pd_matrix(const SparsePoly& p, const MatrixCaps& caps = {});
RankMatrix build_pd_matrix(const SparsePoly& p, std::vector<Var> y_roster, std::vector<Var> z_roster,
                           const MatrixCaps& caps = {});

// Total assignment of field values to variables.
struct Substitution {
  std::unordered_map<Var, FieldElem> values;
  std::uint64_t seed = 0;

  // Throws UnassignedVariableError.
  FieldElem at(const Var& v) const;
  // Uniformly random values for every variable in `vars`.
  static Substitution random(const PrimeField& f, const std::vector<Var>& vars, std::uint64_t seed);
};

// Coefficient matrix at a substitution: each monomial m adds
// coeff(m) * (m / (p q)) evaluated at S to entry [p, q], where p and q are the
// Y- and Z-supports of m.
RankMatrix build_pcm_at(const SparsePoly& p, const Substitution& s, const MatrixCaps& caps = {});

// Max rank of build_pcm_at over `trials` random substitutions: a lower bound
// on the true maximum, exact except with Schwartz-Zippel probability.
std::size_t estimate_maxrank(const SparsePoly& p, std::size_t trials = 8, std::uint64_t seed = 0,
                             const MatrixCaps& caps = {});
// Exhaustive maximum over all substitutions; field modulus <= 7 and at most
// 4 roster variables.
std::size_t exhaustive_maxrank(const SparsePoly& p);

// Rank of the partial derivative matrix restricted to the Y-monomials and
// Z-monomials that occur in p (all other rows and columns are zero).
// Throws CapError if the dense matrix would exceed max_entries.
std::size_t compact_rank(const SparsePoly& p, std::size_t max_entries = std::size_t{1} << 24);

struct RankOptions {
  std::size_t term_cap = kDefaultTermCap;
  std::size_t max_entries = std::size_t{1} << 24;
};

// Exact rank of M_f for a formula over Y/Z variables and constants that is
// read-once in its Y/Z leaves. Products multiply child ranks (variable-
// disjoint factors give a Kronecker product); sums whose subtree mixes Y and Z
// are expanded and ranked on the compacted matrix. Only subtrees below such a
// sum are ever expanded. Throws BlowUpError/CapError when too large.
std::uint64_t formula_rank(const Formula& f, const RankOptions& opt = {});
// Rank of every subtree, indexed by node id.
std::vector<std::uint64_t> node_ranks(const Formula& f, const RankOptions& opt = {});

// Rank of the R x R matrix [f(y^(s), z^(t))] at random points, evaluated in
// one batch. Equals rank(M_f) with high probability when R >= rank(M_f);
// never exceeds it.
std::size_t evaluation_rank(const Formula& f, std::size_t R, std::uint64_t seed);

// Dense CSV with monomial labels on the header row and first column.
std::string to_csv(const RankMatrix& m);

}  // namespace ropbench

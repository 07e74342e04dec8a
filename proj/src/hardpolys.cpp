#include "ropbench/hardpolys.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ropbench/error.hpp"
#include "ropbench/rng.hpp"

namespace ropbench {

Formula gen_plin(std::size_t N, std::size_t mprime, PrimeField field) {
  if (mprime == 0 || N % mprime != 0) {
    throw DivisibilityError("m' = " + std::to_string(mprime) + " does not divide N = " + std::to_string(N));
  }
  if (N / mprime < 2) throw DivisibilityError("linear forms need width at least 2");
  return gen_plin_width(N, mprime, N / mprime, field);
}

Formula gen_plin_width(std::size_t N, std::size_t mprime, std::size_t width, PrimeField field) {
  if (mprime == 0 || width == 0) throw InvalidParamsError("p_lin needs m' >= 1 and width >= 1");
  if (mprime * width > N) throw InvalidParamsError("m' * width exceeds N");
  FormulaBuilder b(field);
  std::vector<NodeId> forms;
  for (std::size_t f = 0; f < mprime; ++f) {
    std::vector<NodeId> terms;
    for (std::size_t i = f * width + 1; i <= (f + 1) * width; ++i) terms.push_back(b.variable(Var::x(static_cast<std::uint32_t>(i))));
    terms.push_back(b.constant(field.one()));
    forms.push_back(b.sum(terms));
  }
  std::vector<Var> universe;
  for (std::size_t i = 1; i <= N; ++i) universe.push_back(Var::x(static_cast<std::uint32_t>(i)));
  return b.build(b.product(forms), std::move(universe));
}

FieldElem g_weight(const PrimeField& field, std::uint64_t w_seed, std::size_t i, std::size_t k, std::size_t j) {
  std::uint64_t idx = (static_cast<std::uint64_t>(i) << 42) | (static_cast<std::uint64_t>(k) << 21) | j;
  CounterRng rng = CounterRng::stream(w_seed, idx);
  return field.from_u64(1 + rng.below(field.modulus() - 1));
}

SparsePoly gen_g(std::size_t n, std::uint64_t w_seed, PrimeField field, std::size_t max_n) {
  if (n == 0) throw InvalidParamsError("g needs n >= 1");
  if (n > max_n) throw SizeError("g limited to n <= " + std::to_string(max_n));
  const std::size_t L = 2 * n;
  // memo[i][j] for 1 <= i <= j+1 <= L+1 with j - i + 1 even; empty interval j = i - 1.
  std::map<std::pair<std::size_t, std::size_t>, SparsePoly> memo;
  auto x = [&](std::size_t i) { return SparsePoly::variable(field, Var::x(static_cast<std::uint32_t>(i))); };
  auto get = [&](std::size_t i, std::size_t j) -> const SparsePoly& { return memo.at({i, j}); };
  for (std::size_t i = 1; i <= L + 1; ++i) memo.emplace(std::make_pair(i, i - 1), SparsePoly::constant(field, field.one()));
  for (std::size_t len = 2; len <= L; len += 2) {
    for (std::size_t i = 1; i + len - 1 <= L; ++i) {
      std::size_t j = i + len - 1;
      SparsePoly cross = poly_add(SparsePoly::constant(field, field.one()), poly_mul(x(i), x(j)));
      SparsePoly acc = poly_mul(cross, get(i + 1, j - 1));
      for (std::size_t k = i + 1; k + 2 <= j; ++k) {
        if ((k - i + 1) % 2 != 0) continue;
        SparsePoly term = poly_mul(get(i, k), get(k + 1, j));
        term = poly_mul(SparsePoly::constant(field, g_weight(field, w_seed, i, k, j)), term);
        acc = poly_add(acc, term);
      }
      memo.emplace(std::make_pair(i, j), std::move(acc));
    }
  }
  return memo.at({1, L});
}

PermanentHandle::PermanentHandle(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidParamsError("permanent needs n >= 1");
}

SparsePoly PermanentHandle::expand(PrimeField field) const {
  if (n_ > 6) throw SizeError("full permanent expansion limited to n <= 6");
  std::vector<Var> roster;
  for (std::size_t i = 1; i <= n_; ++i) {
    for (std::size_t j = 1; j <= n_; ++j) roster.push_back(Var::grid(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
  }
  std::vector<std::size_t> perm(n_);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint8_t> exps;
  std::vector<FieldElem> coeffs;
  do {
    std::size_t off = exps.size();
    exps.resize(off + n_ * n_, 0);
    for (std::size_t i = 0; i < n_; ++i) exps[off + i * n_ + perm[i]] = 1;
    coeffs.push_back(field.one());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return SparsePoly::from_terms(field, std::move(roster), std::move(exps), std::move(coeffs));
}

PartitionMatrix PermanentHandle::partition_matrix(const Partition& phi) const {
  if (n_ > 10) throw SizeError("permanent partition matrix limited to n <= 10");
  return PartitionMatrix::from_partition(phi, n_);
}

RankMatrix PermanentHandle::pd_matrix(const Partition& phi, PrimeField field, const MatrixCaps& caps) const {
  return pd_matrix_of_perm(partition_matrix(phi), field, caps);
}

PermanentHandle gen_perm(std::size_t n) { return PermanentHandle(n); }

}  // namespace ropbench

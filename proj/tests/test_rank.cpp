#include <doctest.h>

#include "oracles.hpp"
#include "ropbench/error.hpp"
#include "ropbench/formula_gen.hpp"
#include "ropbench/partition.hpp"
#include "ropbench/poly.hpp"
#include "ropbench/rank.hpp"

using namespace ropbench;

namespace {

const PrimeField F;

SparsePoly E(const char* s) { return expand(parse_formula(s)); }

// Random multilinear polynomial over y_{off+1}..y_{off+ny}, z_{off+1}..z_{off+nz}.
oracle::Poly random_ml(CounterRng& rng, std::uint32_t ny, std::uint32_t nz, std::size_t terms, std::uint32_t off = 0) {
  oracle::Poly p;
  for (std::size_t t = 0; t < terms; ++t) {
    oracle::Mono m;
    for (std::uint32_t i = off + 1; i <= off + ny; ++i) {
      if (rng.coin()) m[Var::y(i)] = 1;
    }
    for (std::uint32_t i = off + 1; i <= off + nz; ++i) {
      if (rng.coin()) m[Var::z(i)] = 1;
    }
    oracle::add_term(p, m, 1 + rng.below(oracle::P - 1));
  }
  return p;
}

Formula random_partitioned_rof(CounterRng& rng, std::size_t max_vars, double const_prob = 0.2) {
  Formula f = random_rof(1 + rng.below(max_vars), {0.5, const_prob}, rng);
  return apply_partition(f, sample_d_prime(f.universe(), rng));
}

std::vector<std::vector<std::uint64_t>> dense(const RankMatrix& m) {
  std::vector<std::vector<std::uint64_t>> a(m.rows(), std::vector<std::uint64_t>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = m.at(r, c).value;
  }
  return a;
}

}  // namespace

TEST_CASE("polynomial examples") {
  SparsePoly p = E("(* (+ y1 z1) (+ y2 z2))");
  CHECK(p.term_count() == 4);
  CHECK(p.is_multilinear());
  SparsePoly c = E("(+ (* 0 y1) 1)");
  CHECK(c.is_constant());
  CHECK(c.constant_term() == F.one());
  SparsePoly sq = E("(* (+ y1 1) (+ y1 1))");
  CHECK(sq.term_count() == 3);
  CHECK_FALSE(sq.is_multilinear());
  CHECK(oracle::from_sparse(sq) == oracle::Poly{{{{Var::y(1), 2}}, 1}, {{{Var::y(1), 1}}, 2}, {{}, 1}});
  CHECK(poly_add(p, SparsePoly::constant(F, F.zero())) == p);
  CHECK(poly_add(p, poly_neg(p)).is_zero());
  CHECK(E("(* y1 z1)").is_multilinear());
  CHECK_FALSE(E("(* y1 y1)").is_multilinear());
  CHECK(p.count_side(Side::Y) == 2);
}

TEST_CASE("expansion and products agree with the map oracle") {
  CounterRng rng(31);
  for (int i = 0; i < 300; ++i) {
    Formula f = random_rof(1 + rng.below(10), {0.5, 0.3}, rng);
    CHECK(oracle::from_sparse(expand(f)) == oracle::expand(f));
  }
  for (int i = 0; i < 200; ++i) {
    oracle::Poly a = random_ml(rng, 3, 2, rng.below(6)), b = random_ml(rng, 2, 3, rng.below(6));
    SparsePoly sa = oracle::to_sparse(a), sb = oracle::to_sparse(b);
    CHECK(oracle::from_sparse(sa) == a);
    CHECK(oracle::from_sparse(poly_mul(sa, sb)) == oracle::mul(a, b));
    CHECK(oracle::from_sparse(poly_add(sa, sb)) == oracle::add(a, b));
  }
}

TEST_CASE("term caps") {
  Formula f = parse_formula("(* (+ y1 z1 1) (+ y2 z2 1) (+ y3 z3 1))");
  CHECK(expand(f).term_count() == 27);
  CHECK_THROWS_AS(expand(f, 10), BlowUpError);
}

TEST_CASE("read-once formulas expand to multilinear polynomials") {
  CounterRng rng(2);
  for (int i = 0; i < 1000; ++i) CHECK(is_multilinear(expand(random_partitioned_rof(rng, 12))));
}

TEST_CASE("partial derivative matrix examples") {
  RankMatrix m = build_pd_matrix(E("(+ y1 z1)"));
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m.at(0, 0) == F.zero());
  CHECK(m.at(1, 0) == F.one());
  CHECK(m.at(0, 1) == F.one());
  CHECK(m.at(1, 1) == F.zero());
  CHECK(m.rank() == 2);
  RankMatrix yz = build_pd_matrix(E("(* y1 z1)"));
  CHECK(yz.at(1, 1) == F.one());
  CHECK(yz.rank() == 1);
  for (std::uint32_t k = 1; k <= 6; ++k) {
    std::string s = "(*";
    for (std::uint32_t i = 1; i <= k; ++i) s += " (+ y" + std::to_string(i) + " z" + std::to_string(i) + ")";
    s += ")";
    CHECK(build_pd_matrix(E(s.c_str())).rank() == (std::size_t{1} << k));
    CHECK(formula_rank(parse_formula(s)) == (std::uint64_t{1} << k));
  }
  CHECK_THROWS_AS(build_pd_matrix(E("(* y1 y1)")), NonMultilinearError);
  CHECK_THROWS_AS(build_pd_matrix(E("(+ x1 y1)")), PreconditionError);
  CHECK_THROWS_AS(build_pd_matrix(E("(* y1 y2 y3)"), MatrixCaps{2, 2}), CapError);
}

TEST_CASE("dense rank") {
  std::vector<FieldElem> id(16, F.zero());
  for (int i = 0; i < 4; ++i) id[i * 5] = F.one();
  CHECK(rank_in_place(F, id, 4, 4) == 4);
  std::vector<FieldElem> zero(36, F.zero());
  CHECK(rank_in_place(F, zero, 6, 6) == 0);
  CounterRng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::uint64_t> a(18), b(18);
    for (auto& v : a) v = rng.below(oracle::P);
    for (auto& v : b) v = rng.below(oracle::P);
    std::vector<FieldElem> prod(36);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        std::uint64_t s = 0;
        for (int k = 0; k < 3; ++k) s = oracle::addm(s, oracle::mulm(a[i * 3 + k], b[k * 6 + j]));
        prod[i * 6 + j] = {s};
      }
    }
    CHECK(rank_in_place(F, prod, 6, 6) == 3);
  }
}

TEST_CASE("built matrices and ranks agree with the definition") {
  CounterRng rng(17);
  for (int i = 0; i < 300; ++i) {
    oracle::Poly p = random_ml(rng, 1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(10));
    SparsePoly s = oracle::to_sparse(p);
    RankMatrix m = build_pd_matrix(s);
    CHECK(dense(m) == oracle::pd_matrix(p));
    CHECK(m.rank() == oracle::pd_rank(p));
    CHECK(compact_rank(s) == oracle::pd_rank(p));
  }
}

TEST_CASE("coefficient matrix at a substitution") {
  SparsePoly f = E("(* y1 y1 z1)");
  Substitution s;
  s.values[Var::y(1)] = F.from_u64(7);
  s.values[Var::z(1)] = F.from_u64(3);
  RankMatrix m = build_pcm_at(f, s);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.at(r, c) == (r == 1 && c == 1 ? F.from_u64(7) : F.zero()));
  }
  CHECK(m.rank() == 1);
  CHECK(estimate_maxrank(f) == 1);
  CHECK_THROWS_AS(build_pcm_at(f, Substitution{}), UnassignedVariableError);

  CounterRng rng(23);
  for (int i = 0; i < 100; ++i) {
    SparsePoly p = oracle::to_sparse(random_ml(rng, 3, 3, 1 + rng.below(8)));
    std::vector<Var> vars(p.roster());
    RankMatrix pd = build_pd_matrix(p);
    for (int k = 0; k < 3; ++k) CHECK(build_pcm_at(p, Substitution::random(F, vars, rng())) == pd);
    CHECK(estimate_maxrank(p, 1) == pd.rank());
  }
}

TEST_CASE("exhaustive maxrank over a tiny field") {
  PrimeField f5(5);
  // y1^2 z1 + y1 z1 z1: coefficient matrix [[0,0],[0,y1+z1]] has rank 1 unless y1 = -z1.
  SparsePoly p = expand(parse_formula("(+ (* y1 y1 z1) (* y1 z1 z1))", {false, f5}));
  CHECK(exhaustive_maxrank(p) == 1);
  SparsePoly q = expand(parse_formula("(+ y1 z1)", {false, f5}));
  CHECK(exhaustive_maxrank(q) == 2);
  SparsePoly zero = expand(parse_formula("(* 0 y1)", {false, f5}));
  CHECK(exhaustive_maxrank(zero) == 0);
}

TEST_CASE("rank calculus laws") {
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    oracle::Poly a = random_ml(rng, 3, 3, 1 + rng.below(6)), b = random_ml(rng, 3, 3, 1 + rng.below(6));
    oracle::Poly c = random_ml(rng, 2, 3, 1 + rng.below(6), 3);  // disjoint from a
    const std::size_t ra = oracle::pd_rank(a), rb = oracle::pd_rank(b), rc = oracle::pd_rank(c);
    CHECK(compact_rank(oracle::to_sparse(oracle::add(a, b))) <= ra + rb);
    CHECK(compact_rank(oracle::to_sparse(oracle::mul(a, c))) == ra * rc);
  }
}

TEST_CASE("compositional formula rank agrees with the expansion oracle") {
  CounterRng rng(13);
  for (int i = 0; i < 500; ++i) {
    Formula f = random_partitioned_rof(rng, 14);
    const std::size_t want = oracle::pd_rank(oracle::expand(f));
    CHECK(formula_rank(f) == want);
    auto ranks = node_ranks(f);
    CHECK(ranks.size() == f.size());
    CHECK(ranks.back() == want);
    for (NodeId k = 0; k < f.size(); ++k) {
      if (f.node(k).is_gate() && k % 3 == 0) CHECK(ranks[k] == oracle::pd_rank(oracle::expand(f, k)));
    }
    CHECK(evaluation_rank(simplify_constants(f), want + 2, rng()) == want);
  }
}

TEST_CASE("evaluation rank never exceeds the true rank") {
  CounterRng rng(19);
  for (int i = 0; i < 100; ++i) {
    Formula f = random_partitioned_rof(rng, 10);
    const std::size_t want = formula_rank(f);
    CHECK(evaluation_rank(f, 1 + rng.below(4), rng()) <= want);
  }
}

TEST_CASE("serializations") {
  SparsePoly p = E("(+ (* 3 y1 z2) y2)");
  std::string d = dump(p);
  CHECK(d.find('{') == 0);
  CHECK(std::count(d.begin(), d.end(), '\n') >= 3);
  std::string csv = to_csv(build_pd_matrix(E("(+ y1 z1)")));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("z1") != std::string::npos);
}

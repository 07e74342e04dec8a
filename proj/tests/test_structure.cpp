#include <doctest.h>

#include "oracles.hpp"
#include "ropbench/error.hpp"
#include "ropbench/formula_gen.hpp"
#include "ropbench/structure.hpp"

using namespace ropbench;

namespace {

using Kind = MonotoneValueTree::Kind;

Formula P(const char* s) { return parse_formula(s); }

Partition explicit_partition(const std::vector<std::pair<Var, Target>>& m) {
  std::vector<Var> u;
  std::vector<Target> t;
  for (const auto& [v, tt] : m) {
    u.push_back(v);
    t.push_back(tt);
  }
  return Partition(u, t, Distribution::Explicit, 0);
}

std::vector<NodeId> nodes_of(const std::vector<Separator>& s) {
  std::vector<NodeId> out;
  for (const auto& x : s) out.push_back(x.node);
  return out;
}

std::vector<std::int64_t> pattern_ints(const std::vector<std::uint8_t>& p) { return {p.begin(), p.end()}; }

}  // namespace

TEST_CASE("monotone abstraction examples") {
  MonotoneValueTree a = monotone_abstraction(P("(+ y1 z1)"));
  CHECK(a.size() == 1);
  CHECK(a.value() == 2);
  MonotoneValueTree b = monotone_abstraction(P("(* y1 z1)"));
  CHECK(b.size() == 1);
  CHECK(b.value() == 1);
  MonotoneValueTree c = monotone_abstraction(P("(* (+ y1 z1) (+ y2 z2))"));
  CHECK(c.size() == 3);
  CHECK(c.node(static_cast<std::uint32_t>(c.size() - 1)).kind == Kind::Mul);
  CHECK(c.value() == 4);
  CHECK(c.value() == formula_rank(P("(* (+ y1 z1) (+ y2 z2))")));
  // Constants count as 1: (1 * 1) + 1 + 1.
  CHECK(monotone_abstraction(P("(+ (* 5 y1) (+ z1 0))")).value() == 3);
}

TEST_CASE("value dominates rank on random instances") {
  CounterRng rng(61);
  for (int i = 0; i < 1000; ++i) {
    Formula f = random_rof(i % 2 ? 1 + rng.below(16) : 16, {0.5, 0.2}, rng);
    Partition phi = i % 2 ? sample_d_prime(f.universe(), rng) : sample_d(DParams{16, 3, 4, 2}, f.universe(), rng);
    Formula fphi = apply_partition(f, phi);
    MonotoneValueTree g = monotone_abstraction(fphi);
    CHECK(g.value() >= formula_rank(fphi));
    CHECK(value_bound_check(g));
  }
}

TEST_CASE("value bound") {
  MonotoneValueTree one;
  one.leaf(7);
  CHECK(value_bound_check(one));
  MonotoneValueTree chain;
  auto r = chain.leaf(5);
  for (int t = 1; t < 6; ++t) r = chain.mul(r, chain.leaf(5));
  CHECK(chain.value() == boost::multiprecision::pow(BigInt(5), 6));
  CHECK(value_bound_check(chain));
  CHECK_FALSE(value_bound_check(chain, 4));
  CHECK_THROWS_AS(MonotoneValueTree().leaf(0), InvalidParamsError);
  CounterRng rng(8);
  for (int i = 0; i < 1000; ++i) {
    MonotoneValueTree g = random_monotone_tree(1 + rng.below(30), 0.4, 0.5, rng);
    CHECK(g.leaf_count() >= 1);
    CHECK(value_bound_check(g));
  }
}

TEST_CASE("separator count bound") {
  MonotoneValueTree four;
  four.mul(four.leaf(2), four.leaf(2));
  CHECK(count_value_separators(four) == 2);
  CHECK(separator_count_bound(four, 1));
  MonotoneValueTree two;
  two.leaf(2);
  CHECK_THROWS_AS(separator_count_bound(two, 1), PreconditionError);

  MonotoneValueTree sum;
  sum.add(sum.leaf(1), sum.leaf(1));
  CHECK(count_value_separators(sum) == 1);

  CounterRng rng(44);
  for (int i = 0; i < 1000; ++i) {
    MonotoneValueTree g = random_monotone_tree(1 + rng.below(40), 0.3, 0.5, rng);
    const BigInt v = g.value();
    for (std::uint64_t r = 0; BigInt(1) << r < v; ++r) CHECK(separator_count_bound(g, r));
  }
}

TEST_CASE("formula separators") {
  CHECK(find_rank12_separators(P("(+ y1 z1)")).size() == 1);
  CHECK(find_rank12_separators(P("(+ y1 y2)")).empty());
  Formula f = P("(+ (+ y1 z1) (+ y2 z2))");
  auto seps = find_rank12_separators(f);
  CHECK(nodes_of(seps) == std::vector<NodeId>{2, 5});
  for (const auto& s : seps) CHECK_FALSE(s.merged_leaf);
  // The only binary separator has a product below it, so the flat sum's
  // variables y1, z1 still count as a merged-leaf separator.
  auto merged = find_rank12_separators(P("(+ y1 (+ (* y2 z2) z1))"));
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].merged_leaf != merged[1].merged_leaf);
}

TEST_CASE("separator cap accounting misses variables outside depth-1 sums") {
  // x3 + x1 * (x2 + x4) with x1 -> y1, x3 -> z1, x2 -> 1, x4 -> 0: the root is
  // a separator, but the only depth-1 sum maps to {1, 0} and classifies nowhere.
  Formula f = P("(+ x3 (* x1 (+ x2 x4)))");
  Partition phi = explicit_partition(
      {{Var::x(1), Target::y(1)}, {Var::x(2), Target::one()}, {Var::x(3), Target::z(1)}, {Var::x(4), Target::zero()}});
  auto seps = find_rank12_separators(apply_partition(f, phi));
  CHECK(seps.size() == 1);
  auto classes = classify_blocks(extract_depth1_blocks(f, seps, 1), phi);
  CHECK(classes.x6 == 0);
  CHECK(classes.separator_cap() == 0);
}

TEST_CASE("depth-1 blocks") {
  CHECK(extract_depth1_blocks(P("(* x1 x2 x3)"), {}, 3).blocks.empty());
  std::vector<std::vector<Var>> sets{{Var::x(1), Var::x(2), Var::x(3)},
                                     {Var::x(4), Var::x(5), Var::x(6)},
                                     {Var::x(7), Var::x(8), Var::x(9)}};
  Depth1Blocks m = merge_blocks(sets, 5);
  REQUIRE(m.blocks.size() == 2);
  CHECK(m.blocks[0].size() == 6);
  CHECK(m.blocks[1].size() == 3);
  CHECK(m.has_residual);
  Depth1Blocks big = merge_blocks({{Var::x(1), Var::x(2), Var::x(3), Var::x(4), Var::x(5)}, {Var::x(6)}}, 2);
  CHECK(big.oversized == 1);
  CHECK(big.blocks.size() == 2);
  CHECK(big.has_residual);
  CHECK_THROWS_AS(merge_blocks(sets, 0), InvalidParamsError);

  // x1 + x2 + x3 + x4 is a single flat depth-1 sum containing separators but
  // not inside one, so each depth-1 sum is its own set.
  Formula f = P("(* (+ (+ x1 x2) (+ x3 x4)) (+ x5 x6))");
  Partition phi = explicit_partition({{Var::x(1), Target::y(1)},
                                      {Var::x(2), Target::z(1)},
                                      {Var::x(3), Target::y(2)},
                                      {Var::x(4), Target::z(2)},
                                      {Var::x(5), Target::y(3)},
                                      {Var::x(6), Target::one()}});
  Formula fphi = apply_partition(f, phi);
  auto seps = find_rank12_separators(fphi);
  Depth1Blocks d = extract_depth1_blocks(f, seps, 1);
  CHECK(seps.size() == 2);
  REQUIRE(d.blocks.size() == 2);
  CHECK(d.blocks[0].size() == 4);
  CHECK_FALSE(d.has_residual);
}

TEST_CASE("block classes") {
  Partition phi = explicit_partition({{Var::x(1), Target::y(1)},
                                      {Var::x(2), Target::z(1)},
                                      {Var::x(3), Target::y(2)},
                                      {Var::x(4), Target::z(2)},
                                      {Var::x(5), Target::one()},
                                      {Var::x(6), Target::y(3)}});
  auto classify = [&](std::vector<Var> block) {
    Depth1Blocks d;
    d.blocks.push_back(std::move(block));
    return classify_blocks(d, phi);
  };
  CHECK(classify({Var::x(1), Var::x(2)}).x2 == 1);
  CHECK(classify({Var::x(1), Var::x(2), Var::x(3)}).x3 == 1);
  CHECK(classify({Var::x(1), Var::x(2), Var::x(3), Var::x(4)}).x4 == 1);
  CHECK(classify({Var::x(1), Var::x(2), Var::x(3), Var::x(4), Var::x(6)}).x5 == 1);
  CHECK(classify({Var::x(1), Var::x(3)}).unclassified == 1);
  CHECK(classify({Var::x(5)}).unclassified == 1);
  BlockClasses k{1, 2, 3, 4, 0, 0};
  CHECK(k.low_sum() == 10);
  CHECK(k.separator_cap() == 1 + 2 + 2 * 7);
}

TEST_CASE("census bound") {
  Partition yy = explicit_partition({{Var::x(1), Target::y(1)}, {Var::x(2), Target::y(2)}});
  CensusBound a = census_rank_bound(P("(+ x1 x2)"), yy);
  CHECK(a.a_low == 1);
  CHECK(a.twice_exponent() == 1);
  CHECK(a.admits(1));
  CHECK_FALSE(a.admits(2));
  CensusBound b = census_rank_bound(P("(* x1 x2)"), yy);
  CHECK(b.b == 1);
  CHECK(b.admits(2));
  CHECK_FALSE(b.admits(3));

  // (y1 + y2) z1 + (y3 + z2) has rank 3 while the census allows 2^(3/2).
  Formula f = P("(+ (* (+ x1 x2) x3) (+ x4 x5))");
  Partition phi = explicit_partition({{Var::x(1), Target::y(1)},
                                      {Var::x(2), Target::y(2)},
                                      {Var::x(3), Target::z(1)},
                                      {Var::x(4), Target::y(3)},
                                      {Var::x(5), Target::z(2)}});
  CensusBound cb = census_rank_bound(f, phi);
  CHECK(cb.twice_exponent() == 3);
  CHECK(formula_rank(apply_partition(f, phi)) == 3);
  CHECK_FALSE(cb.admits(3));
}

TEST_CASE("special positions") {
  auto x = PartitionMatrix::parse({"y 1 1", "1 1 1", "1 1 1"});
  auto r = special_positions(x);
  REQUIRE(r.y_special.size() == 1);
  CHECK(r.y_special[0] == Cell{0, 0});
  CHECK(r.y_good_rows == 1);
  CHECK(r.y_good_cols == 1);
  CHECK(r.chi_y == 1);
  CHECK(r.gamma() == 0);

  auto col = special_positions(PartitionMatrix::parse({"y 1", "y 1"}));
  CHECK(col.y_good_cols == 0);
  CHECK(col.y_good_rows == 2);
  CHECK(col.gamma_y() == 0);

  auto pair = special_positions(PartitionMatrix::parse({"y 1 1", "1 z 1", "1 1 1"}));
  CHECK(pair.gamma() == 1);
  CHECK(pair.pair_rows_one_good());
  CHECK(pair.one_good_rows == std::vector<bool>{true, true, true});
}

TEST_CASE("perfect matchings agree with the permanent oracle") {
  std::vector<std::uint8_t> id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(perm_nonzero(id, 3));
  std::vector<std::uint8_t> zero_row{1, 1, 1, 0, 0, 0, 1, 1, 1};
  CHECK_FALSE(perm_nonzero(zero_row, 3));
  CounterRng rng(71);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng.below(5);
    std::vector<std::uint8_t> p(n * n);
    const std::uint64_t density = 1 + rng.below(4);
    for (auto& c : p) c = rng.below(5) < density;
    CHECK(perm_nonzero(p, n) == (oracle::permanent(pattern_ints(p), n) > 0));
  }
}

TEST_CASE("block rank and remainder") {
  auto full = PartitionMatrix::parse({"y 1 1", "1 z 1", "1 1 1"});
  auto r = special_positions(full);
  REQUIRE(r.gamma() == 1);
  CHECK(block_full_rank(full, r.pairs[0]));
  CHECK(remainder_perm_nonzero(full, r));
  auto low = PartitionMatrix::parse({"y 0 1", "1 z 1", "1 1 0"});
  auto rl = special_positions(low);
  CHECK_FALSE(block_full_rank(low, rl.pairs[0]));
  CHECK_FALSE(remainder_perm_nonzero(low, rl));
}

TEST_CASE("swap to full rank") {
  auto x = PartitionMatrix::parse({"y 0 0 0 1", "1 z 1 1 1", "1 1 1 1 1", "1 1 1 1 1", "1 1 1 1 1"});
  auto r = special_positions(x);
  REQUIRE(r.gamma() == 1);
  PartitionMatrix out = swap_to_full_rank(x, r);
  auto want = PartitionMatrix::parse({"y 1 0 0 0", "1 z 1 1 1", "1 1 1 1 1", "1 1 1 1 1", "1 1 1 1 1"});
  CHECK(out == want);
  CHECK(block_full_rank(out, r.pairs[0]));

  auto already = PartitionMatrix::parse({"y 1 1", "1 z 1", "1 1 1"});
  CHECK(swap_to_full_rank(already, special_positions(already)) == already);

  auto stuck = PartitionMatrix::parse({"y 0 0", "1 z 1", "1 1 1"});
  CHECK_THROWS_AS(swap_to_full_rank(stuck, special_positions(stuck)), NoEligibleOneError);
}

TEST_CASE("exhaustive scans on small matrices") {
  DichotomyScan d = scan_rank_dichotomy(4, 1, 2);
  CHECK(d.instances > 0);
  CHECK(d.checked > 0);
  CHECK(d.violations == 0);
  CHECK_THROWS_AS(scan_rank_dichotomy(3, 2, 0), InvalidParamsError);

  SwapScan s = scan_swap_injectivity(4, 1, 3);
  CHECK(s.instances > 0);
  CHECK(s.mapped > 0);
  CHECK(s.not_full_rank == 0);
  if (s.example) {
    const auto& [a, b] = *s.example;
    CHECK_FALSE(a == b);
    CHECK(swap_to_full_rank(a, special_positions(a)) == swap_to_full_rank(b, special_positions(b)));
  }
}

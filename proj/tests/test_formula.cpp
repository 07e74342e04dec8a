#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "ropbench/error.hpp"
#include "ropbench/formula.hpp"
#include "ropbench/formula_gen.hpp"
#include "ropbench/hardpolys.hpp"

using namespace ropbench;

namespace {

Formula P(const char* s) { return parse_formula(s); }

// Recursive s_F by definition, walking from every + gate outside the top layer.
std::size_t sum_fanin_oracle(const Formula& f) {
  std::size_t best = 0;
  for (NodeId g = 0; g < f.size(); ++g) {
    if (f.node(g).op != Op::Add) continue;
    bool top = true;
    for (NodeId a = g; a != kNoNode; a = f.parent(a)) top = top && f.node(a).op == Op::Add;
    if (top) continue;
    std::size_t count = 0;
    for (NodeId v = f.subtree_begin(g); v <= g; ++v) {
      if (f.node(v).op == Op::Variable && f.node(f.parent(v)).op == Op::Add) ++count;
    }
    best = std::max(best, count);
  }
  return best;
}

}  // namespace

TEST_CASE("parser builds the expected trees") {
  Formula a = P("(+ x1 x2)");
  CHECK(a.node(a.root()).op == Op::Add);
  CHECK(to_string(a) == "(+ x1 x2)");
  Formula b = P("(* (+ x1 1) x2)");
  CHECK(b.node(b.root()).op == Op::Mul);
  CHECK(b.node(b.node(b.root()).left).op == Op::Add);
  CHECK(to_string(b) == "(* (+ x1 1) x2)");
  CHECK(to_string(P("(+ x1 x2 x3)")) == "(+ x1 (+ x2 x3))");
  CHECK(to_string(P("(* x1)")) == "x1");
  CHECK(to_string(P("-1")) == std::to_string(kMersenne61 - 1));
  CHECK(to_string(P("  ; comment\n (+ x3_4 y2) ")) == "(+ x3_4 y2)");
  CHECK(to_string(parse_formula("(+ 9 x1)", {false, PrimeField(7)})) == "(+ 2 x1)");
}

TEST_CASE("parser errors carry positions") {
  CHECK_THROWS_AS(P(""), ParseError);
  CHECK_THROWS_AS(P("(+ x1 x2"), ParseError);
  CHECK_THROWS_AS(P("(- x1 x2)"), ParseError);
  CHECK_THROWS_AS(P("(+)"), ParseError);
  CHECK_THROWS_AS(P("(+ x1 x2))"), ParseError);
  CHECK_THROWS_AS(P("(+ w1 x2)"), ParseError);
  CHECK_THROWS_AS(P("(+ 1a x2)"), ParseError);
  try {
    P("(+ x1\n  q7)");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse_formula("(+ x1 x1)", {true, {}}), DuplicateVariableError);
  CHECK_NOTHROW(parse_formula("(+ x1 x1)"));
  CHECK_FALSE(P("(+ x1 x1)").is_read_once());
}

TEST_CASE("parse and print round-trip on random formulas") {
  CounterRng rng(3);
  for (int i = 0; i < 300; ++i) {
    Formula f = random_rof(1 + rng.below(20), {0.5, 0.3}, rng);
    Formula g = P(to_string(f).c_str());
    CHECK(to_string(g) == to_string(f));
    CHECK(g.size() == f.size());
    for (NodeId k = 0; k < f.size(); ++k) {
      CHECK(f.node(k).op == g.node(k).op);
      CHECK(f.subtree_begin(k) == g.subtree_begin(k));
    }
  }
}

TEST_CASE("postorder layout and subtrees") {
  Formula f = P("(* (+ x1 x2) (+ x3 (* x4 x5)))");
  CHECK(f.root() == f.size() - 1);
  CHECK(f.subtree_begin(f.root()) == 0);
  for (NodeId i = 0; i < f.size(); ++i) {
    if (f.node(i).is_gate()) {
      CHECK(f.node(i).left < i);
      CHECK(f.node(i).right < i);
      CHECK(f.parent(f.node(i).left) == i);
      CHECK(f.in_subtree(f.node(i).right, i));
    }
  }
  CHECK(f.leaf_variables() == std::vector<Var>{Var::x(1), Var::x(2), Var::x(3), Var::x(4), Var::x(5)});
  CHECK(f.depth() == 3);
  CHECK(to_string(f.subformula(f.node(f.root()).right)) == "(+ x3 (* x4 x5))");
}

TEST_CASE("constant folding") {
  Formula a = normalize_constant_minimal(P("(* (+ 2 3) x1)"));
  CHECK(to_string(a) == "(* 5 x1)");
  CHECK(to_string(normalize_constant_minimal(P("(+ x1 x2)"))) == "(+ x1 x2)");
  CHECK(to_string(normalize_constant_minimal(P("(+ (* 2 3) (+ 1 1))"))) == "8");
  CHECK(normalize_constant_minimal(P("(+ (* 2 3) (+ x1 1))")).is_constant_minimal());
  CHECK_FALSE(P("(* (+ 2 3) x1)").is_constant_minimal());

  CHECK(to_string(simplify_constants(P("(+ (* 0 y1) 1)"))) == "1");
  CHECK(to_string(simplify_constants(P("(* 1 (+ 0 y1))"))) == "y1");
  CHECK(to_string(simplify_constants(P("(* (+ y1 z1) 0)"))) == "0");
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    Formula f = random_rof(1 + rng.below(12), {0.5, 0.4}, rng);
    CHECK(oracle::expand(simplify_constants(f)) == oracle::expand(f));
    CHECK(oracle::expand(normalize_constant_minimal(f)) == oracle::expand(f));
  }
}

TEST_CASE("gate census") {
  CHECK(classify_gates(P("(+ x1 x2)")) == GateCensus{1, 0, 0, 0, 2});
  CHECK(classify_gates(P("(* x1 x2)")) == GateCensus{0, 1, 0, 0, 2});
  CHECK(classify_gates(P("(* (+ x1 x2) (+ x3 x4))")).a == 2);
  GateCensus g = classify_gates(P("(+ (* (+ x1 x2) x3) x4)"));
  CHECK(g.a == 1);
  CHECK(g.b == 0);
  CHECK(g.c == 1);
  CHECK(g.d == 1);
  // A variable with a constant sibling is not typed.
  CHECK(classify_gates(P("(+ x1 1)")) == GateCensus{0, 0, 0, 0, 1});
}

TEST_CASE("sum fan-in measure") {
  CHECK(sum_fanin_measure(gen_plin(16, 4)) == 4);
  CHECK(sum_fanin_measure(P("(* (+ x1 x2 x3 x4) (+ x5 x6 x7 x8) (+ x9 x10 x11 x12) (+ x13 x14 x15 x16))")) == 4);
  CHECK(sum_fanin_measure(P("(* x1 x2)")) == 0);
  CHECK(sum_fanin_measure(P("(+ x1 x2 x3 x4)")) == 0);
  CounterRng rng(12);
  for (int i = 0; i < 300; ++i) {
    Formula f = random_rof(2 + rng.below(30), {0.5, 0.2}, rng);
    CHECK(sum_fanin_measure(f) == sum_fanin_oracle(f));
  }
}

TEST_CASE("flattened gates") {
  Formula f = P("(* (+ x1 (+ x2 x3)) (* x4 (+ x5 (* x6 x7))))");
  std::vector<NodeId> tops;
  for (NodeId i = 0; i < f.size(); ++i) {
    if (f.node(i).is_gate() && is_flat_top(f, i)) tops.push_back(i);
  }
  CHECK(tops.size() == 4);  // x1+x2+x3, root product, x5+(..), x6*x7
  CHECK(flat_operands(f, f.root()).size() == 3);
  auto d1 = depth1_gates(f);
  CHECK(d1.size() == 2);
  for (NodeId g : d1) {
    for (NodeId k : flat_operands(f, g)) CHECK(f.node(k).is_leaf());
  }
}

TEST_CASE("random formula generators") {
  CounterRng rng(21);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(40);
    Formula f = random_rof(n, {0.5, 0.2}, rng);
    CHECK(f.is_read_once());
    std::set<Var> leaves;
    for (const Var& v : f.leaf_variables()) leaves.insert(v);
    CHECK(leaves.size() == n);
  }
  for (std::size_t a : {1, 5, 60}) {
    Formula f = random_rof_with_type_a(a, rng);
    CHECK(classify_gates(f).a == a);
    CHECK(f.leaf_count() == 2 * a);
  }
  for (std::size_t N : {16, 100, 256}) {
    for (std::size_t bound : {2, 4, 9}) {
      SumProductOptions o;
      o.sum_fanin_bound = bound;
      Formula f = random_bounded_fanin_rof(N, o, rng);
      CHECK(f.is_read_once());
      CHECK(sum_fanin_measure(f) <= bound);
      CHECK(f.universe().size() == N);
    }
  }
}

TEST_CASE("evaluation matches the expansion oracle") {
  CounterRng rng(4);
  PrimeField field;
  for (int i = 0; i < 100; ++i) {
    Formula f = random_rof(1 + rng.below(10), {0.5, 0.3}, rng);
    auto poly = oracle::expand(f);
    std::unordered_map<Var, FieldElem> pt;
    for (const Var& v : f.universe()) pt[v] = field.from_u64(rng.below(1000));
    std::uint64_t want = 0;
    for (const auto& [m, c] : poly) {
      std::uint64_t t = c;
      for (const auto& [v, e] : m) t = oracle::mulm(t, oracle::powm(pt[v].value, e));
      want = oracle::addm(want, t);
    }
    CHECK(f.evaluate(pt).value == want);
  }
  CHECK_THROWS_AS(P("(+ x1 x2)").evaluate(std::unordered_map<Var, FieldElem>{{Var::x(1), {1}}}), UnassignedVariableError);
}

#include "ropbench/formula_gen.hpp"

#include <algorithm>

#include "ropbench/error.hpp"

namespace ropbench {

namespace {

FieldElem random_nonzero(const PrimeField& f, CounterRng& rng) {
  return f.from_u64(1 + rng.below(f.modulus() - 1));
}

struct Sub {
  NodeId id;
  std::size_t plus_vars;  // variable leaves below with a + parent
  bool is_var;
};

class Generator {
 public:
  Generator(FormulaBuilder& b, CounterRng& rng) : b_(b), rng_(rng) {}

  NodeId leaf(const Var& v, double const_prob, double add_prob) {
    NodeId x = b_.variable(v);
    if (const_prob > 0 && rng_.uniform01() < const_prob) {
      NodeId c = b_.constant(random_nonzero(b_.field(), rng_));
      Op op = rng_.uniform01() < add_prob ? Op::Add : Op::Mul;
      return rng_.coin() ? b_.gate(op, x, c) : b_.gate(op, c, x);
    }
    return x;
  }

  // Random binary tree over the given subtrees in order.
  NodeId join(std::span<const NodeId> parts, double add_prob) {
    if (parts.size() == 1) return parts[0];
    std::size_t cut = 1 + rng_.below(parts.size() - 1);
    NodeId l = join(parts.first(cut), add_prob);
    NodeId r = join(parts.subspan(cut), add_prob);
    return b_.gate(rng_.uniform01() < add_prob ? Op::Add : Op::Mul, l, r);
  }

  Sub chunk(std::span<const Var> vars, const SumProductOptions& opt) {
    if (vars.size() == 1) {
      NodeId id = leaf(vars[0], opt.const_prob, opt.chunk_add_prob);
      Op op = b_.node(id).op;
      return {id, op == Op::Add ? 1u : 0u, op == Op::Variable};
    }
    std::size_t cut = 1 + rng_.below(vars.size() - 1);
    Sub l = chunk(vars.first(cut), opt);
    Sub r = chunk(vars.subspan(cut), opt);
    bool add = rng_.uniform01() < opt.chunk_add_prob;
    return combine(l, r, add ? Op::Add : Op::Mul);
  }

  // Upper tree over chunk subtrees. `top` is true while every ancestor is +.
  Sub upper(std::span<const Sub> parts, bool top, const SumProductOptions& opt) {
    if (parts.size() == 1) return parts[0];
    bool want_add = rng_.uniform01() >= opt.upper_mul_prob;
    bool child_top = top && want_add;
    std::size_t cut = 1 + rng_.below(parts.size() - 1);
    Sub l = upper(parts.first(cut), child_top, opt);
    Sub r = upper(parts.subspan(cut), child_top, opt);
    Op op = want_add ? Op::Add : Op::Mul;
    if (op == Op::Add && !top) {
      std::size_t count = l.plus_vars + r.plus_vars + l.is_var + r.is_var;
      if (count > opt.sum_fanin_bound) op = Op::Mul;
    }
    return combine(l, r, op);
  }

  Sub combine(const Sub& l, const Sub& r, Op op) {
    NodeId id = b_.gate(op, l.id, r.id);
    std::size_t count = l.plus_vars + r.plus_vars;
    if (op == Op::Add) count += l.is_var + r.is_var;
    return {id, count, false};
  }

 private:
  FormulaBuilder& b_;
  CounterRng& rng_;
};

std::vector<Var> x_range(std::size_t n) {
  std::vector<Var> v;
  v.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) v.push_back(Var::x(static_cast<std::uint32_t>(i)));
  return v;
}

}  // namespace

Formula random_rof(std::span<const Var> vars, const RofOptions& opt, CounterRng& rng, PrimeField field) {
  if (vars.empty()) throw PreconditionError("random_rof needs at least one variable");
  std::vector<Var> order(vars.begin(), vars.end());
  rng.shuffle(std::span<Var>(order));
  FormulaBuilder b(field);
  Generator g(b, rng);
  std::vector<NodeId> leaves;
  leaves.reserve(order.size());
  for (const Var& v : order) leaves.push_back(g.leaf(v, opt.const_prob, opt.add_prob));
  NodeId root = g.join(leaves, opt.add_prob);
  std::vector<Var> universe(vars.begin(), vars.end());
  std::sort(universe.begin(), universe.end());
  return b.build(root, universe);
}

Formula random_rof(std::size_t n, const RofOptions& opt, CounterRng& rng, PrimeField field) {
  auto vars = x_range(n);
  return random_rof(vars, opt, rng, field);
}

Formula random_rof_with_type_a(std::size_t a, CounterRng& rng, PrimeField field) {
  if (a == 0) throw PreconditionError("need at least one type-A gate");
  FormulaBuilder b(field);
  Generator g(b, rng);
  std::vector<NodeId> pairs;
  for (std::size_t i = 0; i < a; ++i) {
    auto lo = static_cast<std::uint32_t>(2 * i + 1);
    pairs.push_back(b.add(b.variable(Var::x(lo)), b.variable(Var::x(lo + 1))));
  }
  return b.build(g.join(pairs, 0.5), x_range(2 * a));
}

Formula random_bounded_fanin_rof(std::size_t N, const SumProductOptions& opt, CounterRng& rng, PrimeField field) {
  if (N == 0) throw PreconditionError("need at least one variable");
  if (opt.sum_fanin_bound < 1) throw InvalidParamsError("sum fan-in bound must be positive");
  std::vector<Var> order = x_range(N);
  rng.shuffle(std::span<Var>(order));
  FormulaBuilder b(field);
  Generator g(b, rng);
  std::vector<Sub> chunks;
  for (std::size_t s = 0; s < N; s += opt.sum_fanin_bound) {
    std::size_t len = std::min(opt.sum_fanin_bound, N - s);
    chunks.push_back(g.chunk(std::span<const Var>(order).subspan(s, len), opt));
  }
  Sub root = g.upper(chunks, true, opt);
  return b.build(root.id, x_range(N));
}

}  // namespace ropbench

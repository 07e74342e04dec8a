#pragma once

#include <span>
#include <vector>

#include "ropbench/formula.hpp"
#include "ropbench/rng.hpp"

namespace ropbench {

struct RofOptions {
  double add_prob = 0.5;    // chance a gate is + (otherwise *)
  double const_prob = 0.0;  // chance a leaf is paired with a random nonzero constant
};

// Random read-once formula over exactly the given variables: shuffle, then
// split recursively at a uniform point. Every variable appears once.
Formula random_rof(std::span<const Var> vars, const RofOptions& opt, CounterRng& rng, PrimeField field = {});
// Convenience overload over x1..xn.
Formula random_rof(std::size_t n, const RofOptions& opt, CounterRng& rng, PrimeField field = {});

// Random ROF on x1..x2a with exactly `a` type-A gates: the pairs
// (x_{2i-1} + x_{2i}) joined by a random +/* tree.
Formula random_rof_with_type_a(std::size_t a, CounterRng& rng, PrimeField field = {});

struct SumProductOptions {
  std::size_t sum_fanin_bound = 4;  // upper bound on the s_F measure
  double chunk_add_prob = 0.75;
  double upper_mul_prob = 0.75;
  double const_prob = 0.1;
};

// Random ROF on x1..xN whose s_F measure is at most opt.sum_fanin_bound.
// Variables are cut into chunks of that size, each chunk becomes a random
// +-heavy ROF, and chunks are joined by a *-heavy tree in which + gates below
// a * gate are only kept while they respect the bound.
Formula random_bounded_fanin_rof(std::size_t N, const SumProductOptions& opt, CounterRng& rng,
                                 PrimeField field = {});

}  // namespace ropbench

#include <algorithm>
#include <cmath>

#include "ropbench/error.hpp"
#include "ropbench/formula_gen.hpp"
#include "ropbench/hardpolys.hpp"
#include "ropbench/harness.hpp"
#include "ropbench/rank.hpp"
#include "ropbench/structure.hpp"

namespace ropbench {

std::int64_t ExperimentConfig::param_int(const std::string& key, std::int64_t fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number_integer()) throw InvalidParamsError("parameter '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double ExperimentConfig::param_double(const std::string& key, double fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw InvalidParamsError("parameter '" + key + "' must be a number");
  return v.get<double>();
}

namespace {

// Smallest integer L with L^q >= N^p, i.e. ceil(N^(p/q)).
std::uint64_t ceil_root(std::uint64_t N, unsigned p, unsigned q) {
  const BigInt target = boost::multiprecision::pow(BigInt(N), p);
  auto guess = static_cast<std::uint64_t>(std::pow(static_cast<double>(N), static_cast<double>(p) / q));
  std::uint64_t L = guess > 2 ? guess - 2 : 0;
  while (boost::multiprecision::pow(BigInt(L), q) < target) ++L;
  return L;
}

// Largest integer L with L^q <= N^p.
std::uint64_t floor_root(std::uint64_t N, unsigned p, unsigned q) {
  std::uint64_t c = ceil_root(N, p, q);
  return boost::multiprecision::pow(BigInt(c), q) == boost::multiprecision::pow(BigInt(N), p) ? c : c - 1;
}

// x >= c * N^(p/q), as x^q >= c^q N^p.
bool at_least_root(std::uint64_t x, std::uint64_t c, std::uint64_t N, unsigned p, unsigned q) {
  return boost::multiprecision::pow(BigInt(x), q) >= boost::multiprecision::pow(BigInt(c), q) * boost::multiprecision::pow(BigInt(N), p);
}

bool rank_at_least_pow2(std::uint64_t rank, std::uint64_t e) { return e < 64 && rank >= (std::uint64_t{1} << e); }

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::size_t size_param(const ExperimentConfig& c, const std::string& key, std::int64_t fallback) {
  std::int64_t v = c.param_int(key, fallback);
  if (v < 0) throw InvalidParamsError("parameter '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

const DParams& checked_d(const ExperimentConfig& c) {
  c.d.validate();
  return c.d;
}

// Depth-1 * gates (flattened, all operands leaves) of f, and how many of them
// do not vanish under phi.
struct DepthOneProducts {
  std::vector<NodeId> gates;
  std::size_t nonzero = 0;
};

DepthOneProducts depth1_products(const Formula& f, const Partition& phi) {
  DepthOneProducts out;
  for (NodeId g : depth1_gates(f)) {
    if (f.node(g).op != Op::Mul) continue;
    out.gates.push_back(g);
    bool zero = false;
    for (NodeId k : flat_operands(f, g)) {
      const Node& n = f.node(k);
      if (n.op == Op::Constant) zero = zero || n.value.value == 0;
      if (n.op == Op::Variable) zero = zero || phi.at(n.var).kind == TargetKind::Zero;
    }
    if (!zero) ++out.nonzero;
  }
  return out;
}

// f with the subtrees rooted at `cut` replaced by the constant 1.
Formula replace_by_one(const Formula& f, const std::vector<NodeId>& cut) {
  std::vector<bool> is_cut(f.size(), false);
  for (NodeId g : cut) is_cut[g] = true;
  FormulaBuilder b(f.field());
  std::vector<NodeId> mapped(f.size(), kNoNode);
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    if (is_cut[i]) {
      mapped[i] = b.constant(f.field().one());
    } else if (n.op == Op::Variable) {
      mapped[i] = b.variable(n.var);
    } else if (n.op == Op::Constant) {
      mapped[i] = b.constant(n.value);
    } else {
      mapped[i] = b.gate(n.op, mapped[n.left], mapped[n.right]);
    }
  }
  return b.build(mapped.back(), f.universe());
}

RofOptions rof_options(const ExperimentConfig& c) {
  RofOptions o;
  o.add_prob = c.param_double("add_prob", 0.5);
  o.const_prob = c.param_double("const_prob", 0.0);
  return o;
}

// ------------------------------------------------------------ formulas on 2n variables

TrialOutcome a_prime_mean(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t a = size_param(c, "a", 40);
  Formula f = random_rof_with_type_a(a, rng);
  Partition phi = sample_d_prime(f.universe(), rng);
  CensusBound cb = census_rank_bound(f, phi);
  // (2/5) a <= a' <= (3/5) a
  const bool in_window = 5 * cb.a_low >= 2 * a && 5 * cb.a_low <= 3 * a;
  return {{i64(a), i64(cb.a_low), i64(cb.a_high)}, in_window, 1, true};
}

TrialOutcome census_bound(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t lo = size_param(c, "min_vars", 2), hi = size_param(c, "max_vars", 24);
  if (lo < 1 || lo > hi) throw InvalidParamsError("need 1 <= min_vars <= max_vars");
  const std::size_t vars = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
  Formula f = random_rof(vars, rof_options(c), rng);
  Partition phi = sample_d_prime(f.universe(), rng);
  const std::uint64_t rank = formula_rank(apply_partition(f, phi));
  CensusBound cb = census_rank_bound(f, phi);
  const bool ok = cb.admits(rank);
  return {{i64(vars), i64(cb.a_low), i64(cb.a_high), i64(cb.b), i64(cb.c), i64(cb.d), i64(cb.twice_exponent()), i64(rank)},
          ok,
          1,
          ok};
}

TrialOutcome rank_general(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t n = size_param(c, "n", 8);
  if (n < 2) throw InvalidParamsError("rank-general needs n >= 2");
  Formula f = random_rof(2 * n, rof_options(c), rng);
  Partition phi = sample_d_prime(f.universe(), rng);
  const std::uint64_t rank = formula_rank(apply_partition(f, phi));
  const double nn = static_cast<double>(n);
  const double exponent = nn - nn / (5 * std::log2(nn));
  const bool above = std::log2(static_cast<double>(rank)) > exponent;
  return {{i64(n), i64(rank), static_cast<std::int64_t>(std::floor(exponent * 1000))}, above, 1, true};
}

TrialOutcome g_balance_rank(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t n = size_param(c, "n", 5);
  const auto vars = x_vars(2 * n);
  Partition phi = sample_d_prime(vars, rng);
  const std::uint64_t w_seed = rng();
  SparsePoly g = gen_g(n, w_seed, PrimeField{}, size_param(c, "max_n", kDefaultGMax));
  const std::size_t rank = build_pd_matrix(apply_partition(g, phi)).rank();
  const auto st = partition_stats(phi);
  // rank >= 2^(n - l/2)  <=>  rank^2 >= 2^(2n - l)
  const std::uint64_t twice = 2 * n - st.imbalance;
  const bool ok = twice >= 128 ? false
                               : static_cast<unsigned __int128>(rank) * rank >= (static_cast<unsigned __int128>(1) << twice);
  return {{i64(n), i64(st.imbalance), i64(st.count_y), i64(rank)}, ok, 1, true};
}

TrialOutcome sum_of_rops_vs_g(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t n = size_param(c, "n", 4);
  const std::size_t s = size_param(c, "s", 4);
  if (s == 0) throw InvalidParamsError("need s >= 1");
  const auto vars = x_vars(2 * n);
  Partition phi = sample_d_prime(vars, rng);
  const PrimeField field;
  SparsePoly sum = SparsePoly::constant(field, field.zero());
  std::uint64_t sum_of_ranks = 0;
  for (std::size_t i = 0; i < s; ++i) {
    Formula fi = apply_partition(random_rof(vars, rof_options(c), rng), phi);
    sum_of_ranks += formula_rank(fi);
    sum = poly_add(sum, expand(fi));
  }
  const std::size_t rank_sum = sum.is_zero() ? 0 : compact_rank(sum);
  const std::size_t g_rank = build_pd_matrix(apply_partition(gen_g(n, rng(), field), phi)).rank();
  const bool ok = rank_sum <= sum_of_ranks;
  return {{i64(n), i64(s), i64(rank_sum), i64(sum_of_ranks), i64(g_rank)}, rank_sum < g_rank, 1, ok};
}

TrialOutcome partition_balance(const ExperimentConfig& c, CounterRng& rng) {
  const std::size_t N = size_param(c, "N", 64);
  Partition phi = sample_d_prime(x_vars(N), rng);
  const auto st = partition_stats(phi);
  // imbalance <= N^(2/3)
  const bool within = boost::multiprecision::pow(BigInt(st.imbalance), 3) <= boost::multiprecision::pow(BigInt(N), 2);
  return {{i64(N), i64(st.count_y), i64(st.count_z), i64(st.imbalance)}, within, 1, true};
}

// ------------------------------------------------------------ sparse partitions

TrialOutcome plin_rank(const ExperimentConfig& c, CounterRng& rng) {
  const DParams& d = checked_d(c);
  const std::size_t N = d.N;
  const auto default_mprime = 2 * static_cast<std::int64_t>(std::llround(std::cbrt(static_cast<double>(N))));
  const std::size_t mprime = size_param(c, "mprime", default_mprime);
  if (mprime == 0) throw InvalidParamsError("mprime must be positive");
  const std::size_t width = size_param(c, "width", static_cast<std::int64_t>(N / mprime));
  Formula f = gen_plin_width(N, mprime, width);
  Partition phi = sample_d(d, f.universe(), rng);

  std::size_t rho = 0;
  for (std::size_t k = 0; k < mprime; ++k) {
    bool y = false, z = false;
    for (std::size_t i = k * width + 1; i <= (k + 1) * width; ++i) {
      const auto kind = phi.at(Var::x(static_cast<std::uint32_t>(i))).kind;
      y = y || kind == TargetKind::Y;
      z = z || kind == TargetKind::Z;
    }
    rho += y && z;
  }
  Formula fphi = apply_partition(f, phi);
  const std::uint64_t rank = formula_rank(fphi);
  bool ok = rho < 64 && rank == (std::uint64_t{1} << rho);
  std::int64_t eval = -1;
  if (rho <= size_param(c, "max_eval_rho", 9)) {
    const std::size_t R = (std::size_t{1} << rho) + 2;
    eval = i64(evaluation_rank(simplify_constants(fphi), R, rng()));
    ok = ok && eval == i64(std::uint64_t{1} << rho);
  }
  return {{i64(N), i64(mprime), i64(width), i64(rho), i64(rank), eval}, rho, mprime, ok};
}

TrialOutcome nonzero_depth1_muls(const ExperimentConfig& c, CounterRng& rng) {
  const DParams& d = checked_d(c);
  Formula f = random_rof(d.N, rof_options(c), rng);
  Partition phi = sample_d(d, f.universe(), rng);
  const auto prods = depth1_products(f, phi);
  const double n = std::sqrt(static_cast<double>(d.N));
  const auto fallback = static_cast<std::int64_t>(std::ceil(std::cbrt(n) * std::log2(n)));
  const std::size_t threshold = size_param(c, "threshold", fallback);
  return {{i64(d.N), i64(prods.gates.size()), i64(prods.nonzero), i64(threshold)}, prods.nonzero > threshold, 1, true};
}

TrialOutcome depth1_prune(const ExperimentConfig& c, CounterRng& rng) {
  const DParams& d = checked_d(c);
  Formula f = random_rof(d.N, rof_options(c), rng);
  Partition phi = sample_d(d, f.universe(), rng);
  const auto prods = depth1_products(f, phi);
  const std::uint64_t rank = formula_rank(apply_partition(f, phi));
  const std::uint64_t pruned = formula_rank(apply_partition(replace_by_one(f, prods.gates), phi));
  const std::size_t X = prods.nonzero;
  const bool ok = X >= 64 || static_cast<unsigned __int128>(rank) <= static_cast<unsigned __int128>(pruned) << X;
  return {{i64(d.N), i64(prods.gates.size()), i64(X), i64(rank), i64(pruned)}, ok, 1, ok};
}

struct SumProductTrial {
  std::size_t bound = 0;
  Formula f;
  Partition phi;
  Formula fphi;
};

SumProductTrial sum_product_trial(const ExperimentConfig& c, CounterRng& rng) {
  const DParams& d = checked_d(c);
  SumProductTrial t;
  // s_F <= N^(1/2 + 1/30) = N^(8/15)
  t.bound = size_param(c, "sum_fanin_bound", i64(floor_root(d.N, 8, 15)));
  SumProductOptions opt;
  opt.sum_fanin_bound = t.bound;
  opt.chunk_add_prob = c.param_double("chunk_add_prob", opt.chunk_add_prob);
  opt.upper_mul_prob = c.param_double("upper_mul_prob", opt.upper_mul_prob);
  opt.const_prob = c.param_double("const_prob", opt.const_prob);
  t.f = random_bounded_fanin_rof(d.N, opt, rng);
  t.phi = sample_d(d, t.f.universe(), rng);
  t.fphi = apply_partition(t.f, t.phi);
  return t;
}

struct BlockStats {
  std::vector<Separator> seps;
  Depth1Blocks blocks;
  BlockClasses classes;
};

BlockStats block_stats(const ExperimentConfig& c, const SumProductTrial& t) {
  BlockStats s;
  s.seps = find_rank12_separators(t.fphi);
  const std::size_t L = size_param(c, "block_floor", i64(ceil_root(c.d.N, 8, 15)));
  s.blocks = extract_depth1_blocks(t.f, s.seps, L);
  s.classes = classify_blocks(s.blocks, t.phi);
  return s;
}

TrialOutcome block_classes(const ExperimentConfig& c, CounterRng& rng) {
  auto t = sum_product_trial(c, rng);
  auto s = block_stats(c, t);
  const auto& k = s.classes;
  // |X2| + ... + |X5| >= 4 N^(4/15)
  const bool tail = at_least_root(k.low_sum(), 4, c.d.N, 4, 15);
  return {{i64(c.d.N), i64(s.blocks.floor), i64(s.blocks.blocks.size()), i64(k.x2), i64(k.x3), i64(k.x4), i64(k.x5),
           i64(k.x6), i64(k.unclassified), i64(k.low_sum()), s.blocks.has_residual ? 1 : 0},
          tail,
          1,
          true};
}

TrialOutcome separator_cap(const ExperimentConfig& c, CounterRng& rng) {
  auto t = sum_product_trial(c, rng);
  auto s = block_stats(c, t);
  const auto& k = s.classes;
  const bool ok = k.x6 != 0 || s.seps.size() <= k.separator_cap();
  return {{i64(c.d.N), i64(s.seps.size()), i64(k.separator_cap()), i64(k.x6)}, ok, 1, ok};
}

TrialOutcome rank_sum_product(const ExperimentConfig& c, CounterRng& rng) {
  auto t = sum_product_trial(c, rng);
  const std::uint64_t rank = formula_rank(t.fphi);
  const std::uint64_t e = ceil_root(c.d.N, 4, 15);  // ceil(N^(4/15))
  return {{i64(c.d.N), i64(t.bound), i64(sum_fanin_measure(t.f)), i64(rank), i64(e)}, rank_at_least_pow2(rank, e), 1, true};
}

// ------------------------------------------------------------ partition matrices

struct MatrixTrial {
  PartitionMatrix x;
  SpecialPositionReport report;
};

MatrixTrial matrix_trial(const ExperimentConfig& c, CounterRng& rng) {
  const DParams& d = checked_d(c);
  if (d.n * d.n != d.N) throw InvalidParamsError("matrix experiments need N = n^2");
  Partition phi = sample_d(d, grid_vars(d.n), rng);
  MatrixTrial t{PartitionMatrix::from_partition(phi, d.n), {}};
  t.report = special_positions(t.x);
  return t;
}

TrialOutcome ybound(const ExperimentConfig& c, CounterRng& rng) {
  auto t = matrix_trial(c, rng);
  const std::uint64_t m = c.d.m, chi = t.report.chi_y;
  // 3m/4 < chi < 5m/4
  const bool in = 3 * m < 4 * chi && 4 * chi < 5 * m;
  return {{i64(c.d.n), i64(m), i64(t.report.chi_y), i64(t.report.chi_z)}, in, 1, true};
}

TrialOutcome qgood(const ExperimentConfig& c, CounterRng& rng) {
  auto t = matrix_trial(c, rng);
  const auto& r = t.report;
  const bool good = 3 * r.y_good_cols >= 2 * c.d.m;  // eta_Y >= 2m/3
  return {{i64(c.d.n), i64(c.d.m), i64(r.y_good_cols), i64(r.y_good_rows), i64(r.z_good_cols), i64(r.z_good_rows)},
          good,
          1,
          true};
}

TrialOutcome special_pos(const ExperimentConfig& c, CounterRng& rng) {
  auto t = matrix_trial(c, rng);
  const auto& r = t.report;
  const bool hit = 12 * r.gamma_y() >= c.d.m;  // gamma_Y >= m/12
  return {{i64(c.d.n), i64(c.d.m), i64(r.gamma_y()), i64(r.gamma_z()), i64(r.gamma())}, hit, 1, true};
}

TrialOutcome perm_rank(const ExperimentConfig& c, CounterRng& rng) {
  auto t = matrix_trial(c, rng);
  const auto& r = t.report;
  MatrixCaps caps{size_param(c, "max_y", 10), size_param(c, "max_z", 10)};
  const std::size_t rank = pd_matrix_of_perm(t.x, PrimeField{}, caps).rank();
  const bool f1 = 12 * r.gamma() >= c.d.m;
  const bool f2 = r.pair_rows_one_good();
  const bool f3 = remainder_perm_nonzero(t.x, r);
  return {{i64(c.d.n), i64(r.chi_y), i64(r.chi_z), i64(r.gamma()), f1, f2, f3, i64(rank)},
          rank_at_least_pow2(rank, r.gamma()),
          1,
          true};
}

TrialOutcome swap_dichotomy(const ExperimentConfig& c, CounterRng& rng) {
  auto t = matrix_trial(c, rng);
  const auto& r = t.report;
  const bool f2 = r.pair_rows_one_good();
  const bool f3 = remainder_perm_nonzero(t.x, r);
  bool full = std::all_of(r.pairs.begin(), r.pairs.end(), [&](const SpecialPair& p) { return block_full_rank(t.x, p); });
  bool ok = true;
  std::int64_t rank = -1;
  if (r.gamma() >= 1 && f2 && f3) {
    if (full) {
      rank = i64(pd_matrix_of_perm(t.x).rank());
      ok = rank_at_least_pow2(static_cast<std::uint64_t>(rank), r.gamma());
    } else {
      PartitionMatrix img = swap_to_full_rank(t.x, r);
      ok = std::all_of(r.pairs.begin(), r.pairs.end(), [&](const SpecialPair& p) { return block_full_rank(img, p); });
    }
  }
  return {{i64(c.d.n), i64(r.gamma()), f2, f3, full, rank}, r.gamma() >= 1 && f2 && f3 && full, 1, ok};
}

std::vector<ExperimentInfo> build_registry() {
  return {
      {"a-prime-mean", "(2/5)a <= a' <= (3/5)a for a' the rank-1 type-A gates", {"a", "a_prime", "a_double_prime"}, false,
       a_prime_mean},
      {"census-bound", "rank <= 2^(a''+a'/2+b+c/2)",
       {"vars", "a_prime", "a_double_prime", "b", "c", "d", "twice_exponent", "rank"}, true, census_bound},
      {"rank-general", "log2 rank > n - n/(5 log2 n)", {"n", "rank", "exponent_milli"}, false, rank_general},
      {"g-balance-rank", "rank >= 2^(n - l/2)", {"n", "imbalance", "count_y", "rank"}, false, g_balance_rank},
      {"sum-of-rops-vs-g", "rank of the sum below rank of g; law: sub-additivity",
       {"n", "s", "rank_sum", "sum_of_ranks", "g_rank"}, true, sum_of_rops_vs_g},
      {"partition-balance", "imbalance <= N^(2/3)", {"N", "count_y", "count_z", "imbalance"}, false, partition_balance},
      {"plin-rank", "per-form rank-2 frequency; law: rank = 2^rho",
       {"N", "mprime", "width", "rho", "rank", "eval_rank"}, true, plin_rank},
      {"nonzero-depth1-muls", "nonzero depth-1 products > threshold", {"N", "depth1_muls", "nonzero", "threshold"}, false,
       nonzero_depth1_muls},
      {"depth1-prune", "law: rank(F) <= rank(F') 2^X", {"N", "depth1_muls", "X", "rank", "pruned_rank"}, true,
       depth1_prune},
      {"block-classes", "|X2|+|X3|+|X4|+|X5| >= 4 N^(4/15)",
       {"N", "floor", "blocks", "x2", "x3", "x4", "x5", "x6", "unclassified", "low_sum", "residual"}, false,
       block_classes},
      {"separator-cap", "law: separators <= |X2|+|X3|+2(|X4|+|X5|) when |X6| = 0",
       {"N", "separators", "cap", "x6"}, true, separator_cap},
      {"rank-sum-product", "rank >= 2^ceil(N^(4/15))", {"N", "sum_fanin_bound", "sum_fanin", "rank", "exponent"}, false,
       rank_sum_product},
      {"ybound", "3m/4 < chi_Y < 5m/4", {"n", "m", "chi_y", "chi_z"}, false, ybound},
      {"qgood", "Y-good columns >= 2m/3", {"n", "m", "y_good_cols", "y_good_rows", "z_good_cols", "z_good_rows"}, false,
       qgood},
      {"special-pos", "gamma_Y >= m/12", {"n", "m", "gamma_y", "gamma_z", "gamma"}, false, special_pos},
      {"perm-rank", "rank >= 2^gamma", {"n", "chi_y", "chi_z", "gamma", "f1", "f2", "f3", "rank"}, false, perm_rank},
      {"swap-dichotomy", "matrix in the full-rank class; law: rank >= 2^gamma there, swap output full rank",
       {"n", "gamma", "f2", "f3", "blocks_full", "rank"}, true, swap_dichotomy},
  };
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = build_registry();
  return registry;
}

const ExperimentInfo& find_experiment(std::string_view name) {
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return e;
  }
  throw InvalidParamsError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace ropbench

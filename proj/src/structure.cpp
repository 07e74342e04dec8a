#include "ropbench/structure.hpp"

#include <algorithm>
#include <map>

#include "ropbench/error.hpp"

namespace ropbench {

// ------------------------------------------------------------ value trees

std::uint32_t MonotoneValueTree::leaf(BigInt label) {
  if (label < 1) throw InvalidParamsError("value tree leaves must be positive");
  Node n;
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t MonotoneValueTree::gate(Kind k, std::uint32_t l, std::uint32_t r) {
  if (k == Kind::Leaf || l >= nodes_.size() || r >= nodes_.size()) throw InvalidParamsError("bad value tree gate");
  Node n;
  n.kind = k;
  n.left = l;
  n.right = r;
  nodes_.push_back(std::move(n));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::size_t MonotoneValueTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == Kind::Leaf; }));
}

BigInt MonotoneValueTree::max_leaf() const {
  BigInt m = 0;
  for (const auto& n : nodes_) {
    if (n.kind == Kind::Leaf && n.label > m) m = n.label;
  }
  return m;
}

std::vector<BigInt> MonotoneValueTree::values() const {
  std::vector<BigInt> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Leaf: v[i] = n.label; break;
      case Kind::Add: v[i] = v[n.left] + v[n.right]; break;
      case Kind::Mul: v[i] = v[n.left] * v[n.right]; break;
    }
  }
  return v;
}

BigInt MonotoneValueTree::value() const {
  if (nodes_.empty()) throw PreconditionError("empty value tree");
  return values().back();
}

std::string MonotoneValueTree::to_string() const {
  if (nodes_.empty()) return "()";
  std::vector<std::string> s(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.kind == Kind::Leaf) {
      s[i] = n.label.str();
    } else {
      s[i] = std::string("(") + (n.kind == Kind::Add ? "+ " : "* ") + s[n.left] + " " + s[n.right] + ")";
    }
  }
  return s.back();
}

namespace {

struct Abstractor {
  const Formula& f;
  MonotoneValueTree g;

  std::uint32_t visit(NodeId id) {
    const Node& n = f.node(id);
    if (n.is_leaf()) return g.leaf(1);
    std::vector<std::uint32_t> parts;
    bool has_y = false, has_z = false, grouped = false;
    std::size_t group_slot = 0;
    for (NodeId k : flat_operands(f, id)) {
      const Node& c = f.node(k);
      if (c.op == Op::Variable) {
        has_y = has_y || c.var.side == Side::Y;
        has_z = has_z || c.var.side == Side::Z;
        if (!grouped) {
          grouped = true;
          group_slot = parts.size();
          parts.push_back(0);
        }
      } else if (c.op == Op::Constant) {
        parts.push_back(g.leaf(1));
      } else {
        parts.push_back(visit(k));
      }
    }
    if (grouped) parts[group_slot] = g.leaf(n.op == Op::Add && has_y && has_z ? 2 : 1);
    auto kind = n.op == Op::Add ? MonotoneValueTree::Kind::Add : MonotoneValueTree::Kind::Mul;
    std::uint32_t acc = parts.back();
    for (std::size_t k = parts.size() - 1; k-- > 0;) acc = g.gate(kind, parts[k], acc);
    return acc;
  }
};

}  // namespace

MonotoneValueTree monotone_abstraction(const Formula& fphi) {
  Abstractor a{fphi, {}};
  a.visit(fphi.root());
  return std::move(a.g);
}

bool value_bound_check(const MonotoneValueTree& g) {
  BigInt N = g.max_leaf();
  if (N < 2) N = 2;
  return value_bound_check(g, N);
}

bool value_bound_check(const MonotoneValueTree& g, const BigInt& N) {
  BigInt bound = boost::multiprecision::pow(N, static_cast<unsigned>(g.leaf_count()));
  return g.value() <= bound;
}

std::size_t count_value_separators(const MonotoneValueTree& g) {
  auto v = g.values();
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& n = g.node(static_cast<std::uint32_t>(i));
    if (v[i] != 2) continue;
    if (n.kind == MonotoneValueTree::Kind::Leaf) ++count;
    if (n.kind == MonotoneValueTree::Kind::Add && v[n.left] == 1 && v[n.right] == 1) ++count;
  }
  return count;
}

bool separator_count_bound(const MonotoneValueTree& g, std::uint64_t r) {
  BigInt N = g.leaf_count();
  if (N < 2) N = 2;
  return separator_count_bound(g, r, N);
}

bool separator_count_bound(const MonotoneValueTree& g, std::uint64_t r, const BigInt& N) {
  if (N < 2) throw InvalidParamsError("separator bound needs N >= 2");
  BigInt two_r = BigInt(1) << static_cast<unsigned>(r);
  if (g.value() <= two_r) throw PreconditionError("value of the tree is at most 2^r");
  std::size_t s = count_value_separators(g);
  if (s >= r) return true;
  return boost::multiprecision::pow(N, static_cast<unsigned>(s)) >= two_r;
}

namespace {

std::uint32_t grow(MonotoneValueTree& g, std::size_t leaves, double prob_two, double add_prob, CounterRng& rng) {
  if (leaves == 1) return g.leaf(rng.uniform01() < prob_two ? 2 : 1);
  std::size_t split = 1 + static_cast<std::size_t>(rng.below(leaves - 1));
  std::uint32_t l = grow(g, split, prob_two, add_prob, rng);
  std::uint32_t r = grow(g, leaves - split, prob_two, add_prob, rng);
  return rng.uniform01() < add_prob ? g.add(l, r) : g.mul(l, r);
}

}  // namespace

MonotoneValueTree random_monotone_tree(std::size_t leaves, double prob_two, double add_prob, CounterRng& rng) {
  if (leaves == 0) throw InvalidParamsError("value tree needs at least one leaf");
  MonotoneValueTree g;
  grow(g, leaves, prob_two, add_prob, rng);
  return g;
}

// ------------------------------------------------------------ separators

std::vector<Separator> find_rank12_separators(const Formula& fphi, const RankOptions& opt) {
  const auto ranks = node_ranks(fphi, opt);
  const std::size_t size = fphi.size();

  std::vector<NodeId> top(size);
  for (NodeId i = static_cast<NodeId>(size); i-- > 0;) {
    NodeId p = fphi.parent(i);
    top[i] = (p != kNoNode && fphi.node(p).op == fphi.node(i).op) ? top[p] : i;
  }
  // mul_below[i]: the subtree of i contains a * gate.
  std::vector<bool> mul_below(size, false);
  for (NodeId i = 0; i < size; ++i) {
    const Node& n = fphi.node(i);
    if (n.is_gate()) mul_below[i] = n.op == Op::Mul || mul_below[n.left] || mul_below[n.right];
  }

  std::vector<Separator> out;
  std::vector<bool> covered(size, false);
  for (NodeId i = 0; i < size; ++i) {
    const Node& n = fphi.node(i);
    if (n.op != Op::Add) continue;
    if (ranks[i] == 2 && ranks[n.left] == 1 && ranks[n.right] == 1) {
      out.push_back({i, false});
      if (!mul_below[i]) covered[top[i]] = true;
    }
  }
  for (NodeId i = 0; i < size; ++i) {
    if (fphi.node(i).op != Op::Add || top[i] != i || covered[i]) continue;
    bool has_y = false, has_z = false;
    for (NodeId k : flat_operands(fphi, i)) {
      const Node& c = fphi.node(k);
      if (c.op != Op::Variable) continue;
      has_y = has_y || c.var.side == Side::Y;
      has_z = has_z || c.var.side == Side::Z;
    }
    if (has_y && has_z) out.push_back({i, true});
  }
  return out;
}

// ------------------------------------------------------------ depth-1 blocks

Depth1Blocks merge_blocks(const std::vector<std::vector<Var>>& sets, std::size_t L) {
  if (L == 0) throw InvalidParamsError("block floor must be positive");
  Depth1Blocks out;
  out.floor = L;
  std::vector<Var> acc;
  for (const auto& s : sets) {
    if (s.empty()) continue;
    if (s.size() >= L) {
      if (s.size() > 2 * L) ++out.oversized;
      out.blocks.push_back(s);
      continue;
    }
    acc.insert(acc.end(), s.begin(), s.end());
    if (acc.size() >= L) {
      out.blocks.push_back(std::move(acc));
      acc.clear();
    }
  }
  if (!acc.empty()) {
    out.blocks.push_back(std::move(acc));
    out.has_residual = true;
  }
  return out;
}

Depth1Blocks extract_depth1_blocks(const Formula& f, const std::vector<Separator>& separators, std::size_t L) {
  struct Set {
    NodeId position;
    std::vector<Var> vars;
  };
  std::vector<Set> sets;
  std::map<std::size_t, std::size_t> by_separator;  // separator index -> sets slot

  for (NodeId g : depth1_gates(f)) {
    if (f.node(g).op != Op::Add) continue;
    std::vector<Var> vars;
    for (NodeId k : flat_operands(f, g)) {
      if (f.node(k).op == Op::Variable) vars.push_back(f.node(k).var);
    }
    if (vars.empty()) continue;
    std::size_t sep = separators.size();
    for (std::size_t s = 0; s < separators.size(); ++s) {
      if (f.in_subtree(g, separators[s].node)) {
        sep = s;
        break;
      }
    }
    const NodeId pos = f.subtree_begin(g);
    if (sep == separators.size()) {
      sets.push_back({pos, std::move(vars)});
      continue;
    }
    auto [it, fresh] = by_separator.try_emplace(sep, sets.size());
    if (fresh) {
      sets.push_back({pos, std::move(vars)});
    } else {
      auto& dst = sets[it->second];
      dst.position = std::min(dst.position, pos);
      dst.vars.insert(dst.vars.end(), vars.begin(), vars.end());
    }
  }
  std::stable_sort(sets.begin(), sets.end(), [](const Set& a, const Set& b) { return a.position < b.position; });
  std::vector<std::vector<Var>> plain;
  plain.reserve(sets.size());
  for (auto& s : sets) plain.push_back(std::move(s.vars));
  return merge_blocks(plain, L);
}

BlockClasses classify_blocks(const Depth1Blocks& blocks, const Partition& phi) {
  BlockClasses c;
  for (const auto& b : blocks.blocks) {
    std::size_t y = 0, z = 0;
    for (const Var& v : b) {
      const Target& t = phi.at(v);
      y += t.kind == TargetKind::Y;
      z += t.kind == TargetKind::Z;
    }
    const std::size_t w = y + z;
    if (w == 2 && y == 1) {
      ++c.x2;
    } else if (w == 3 && y >= 1 && z >= 1) {
      ++c.x3;
    } else if (w == 4 && y == 2) {
      ++c.x4;
    } else if (w == 5 && (y == 2 || y == 3)) {
      ++c.x5;
    } else if (w >= 6 && y >= 3 && z >= 3) {
      ++c.x6;
    } else {
      ++c.unclassified;
    }
  }
  return c;
}

// ------------------------------------------------------------ census bound

bool CensusBound::admits(std::uint64_t rank) const {
  const std::uint64_t t = twice_exponent();
  if (t >= 128) return true;
  unsigned __int128 sq = static_cast<unsigned __int128>(rank) * rank;
  return sq <= (static_cast<unsigned __int128>(1) << t);
}

std::string CensusBound::exponent_string() const {
  const std::uint64_t t = twice_exponent();
  return std::to_string(t / 2) + (t % 2 ? ".5" : "");
}

CensusBound census_rank_bound(const Formula& f, const Partition& phi) {
  CensusBound out;
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    if (!n.is_gate()) continue;
    const Node& l = f.node(n.left);
    const Node& r = f.node(n.right);
    const bool lv = l.op == Op::Variable, rv = r.op == Op::Variable;
    if (lv && rv) {
      if (n.op == Op::Mul) {
        ++out.b;
        continue;
      }
      const Target& a = phi.at(l.var);
      const Target& b = phi.at(r.var);
      const bool mixed = (a.kind == TargetKind::Y && b.kind == TargetKind::Z) ||
                         (a.kind == TargetKind::Z && b.kind == TargetKind::Y);
      ++(mixed ? out.a_high : out.a_low);
    } else if ((lv && r.is_gate()) || (rv && l.is_gate())) {
      ++(n.op == Op::Add ? out.c : out.d);
    }
  }
  return out;
}

// ------------------------------------------------------------ permanent

std::vector<bool> SpecialPositionReport::pair_columns() const {
  std::vector<bool> cols(n, false);
  for (const auto& p : pairs) {
    cols[p.y.col] = true;
    cols[p.z.col] = true;
  }
  return cols;
}

bool SpecialPositionReport::pair_rows_one_good() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [&](const SpecialPair& p) { return one_good_rows[p.y.row] && one_good_rows[p.z.row]; });
}

SpecialPositionReport special_positions(const PartitionMatrix& x) {
  const std::size_t n = x.n();
  SpecialPositionReport r;
  r.n = n;
  std::vector<std::size_t> row_w(n, 0), col_w(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto k = x.at(i, j).kind;
      if (k == TargetKind::Y) ++r.chi_y;
      if (k == TargetKind::Z) ++r.chi_z;
      if (x.at(i, j).is_variable()) {
        ++row_w[i];
        ++col_w[j];
      }
    }
  }
  std::vector<bool> special_col(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto k = x.at(i, j).kind;
      if (row_w[i] != 1 || col_w[j] != 1) continue;
      if (k == TargetKind::Y) r.y_special.push_back({i, j});
      if (k == TargetKind::Z) r.z_special.push_back({i, j});
      if (x.at(i, j).is_variable()) special_col[j] = true;
    }
  }
  // A column (row) with exactly one Y/Z cell is good for that cell's side.
  for (std::size_t j = 0; j < n; ++j) {
    if (col_w[j] != 1) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = x.at(i, j).kind;
      if (k == TargetKind::Y) ++r.y_good_cols;
      if (k == TargetKind::Z) ++r.z_good_cols;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_w[i] != 1) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const auto k = x.at(i, j).kind;
      if (k == TargetKind::Y) ++r.y_good_rows;
      if (k == TargetKind::Z) ++r.z_good_rows;
    }
  }
  r.one_good_rows.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && !r.one_good_rows[i]; ++j) {
      if (!special_col[j] && x.at(i, j).kind == TargetKind::One) r.one_good_rows[i] = true;
    }
  }
  const std::size_t gamma = std::min(r.y_special.size(), r.z_special.size());
  for (std::size_t p = 0; p < gamma; ++p) r.pairs.push_back({r.y_special[p], r.z_special[p]});
  return r;
}

bool perm_nonzero(const std::vector<std::uint8_t>& pattern, std::size_t n) {
  if (pattern.size() != n * n) throw InvalidParamsError("pattern is not n x n");
  std::vector<std::size_t> match_col(n, n);  // column -> row
  std::vector<bool> seen;
  auto augment = [&](auto&& self, std::size_t row) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (!pattern[row * n + j] || seen[j]) continue;
      seen[j] = true;
      if (match_col[j] == n || self(self, match_col[j])) {
        match_col[j] = row;
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    seen.assign(n, false);
    if (!augment(augment, i)) return false;
  }
  return true;
}

bool block_full_rank(const PartitionMatrix& x, const SpecialPair& p) {
  return x.at(p.z.row, p.y.col).kind == TargetKind::One && x.at(p.y.row, p.z.col).kind == TargetKind::One;
}

bool remainder_perm_nonzero(const PartitionMatrix& x, const SpecialPositionReport& r) {
  const std::size_t n = x.n();
  std::vector<bool> drop_r(n, false), drop_c(n, false);
  for (const auto& p : r.pairs) {
    drop_r[p.y.row] = drop_r[p.z.row] = true;
    drop_c[p.y.col] = drop_c[p.z.col] = true;
  }
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop_r[i]) rows.push_back(i);
    if (!drop_c[i]) cols.push_back(i);
  }
  const std::size_t k = rows.size();
  std::vector<std::uint8_t> pat(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) pat[a * k + b] = x.at(rows[a], cols[b]).kind == TargetKind::One;
  }
  return perm_nonzero(pat, k);
}

PartitionMatrix swap_to_full_rank(const PartitionMatrix& x, const SpecialPositionReport& r) {
  if (r.n != x.n()) throw InvalidParamsError("report does not match the matrix");
  PartitionMatrix out = x;
  const auto pair_cols = r.pair_columns();
  auto fix = [&](std::size_t row, std::size_t col) {
    if (x.at(row, col).kind != TargetKind::Zero) return;
    out.set(row, col, Target::one());
    for (std::size_t c = 0; c < x.n(); ++c) {
      if (!pair_cols[c] && x.at(row, c).kind == TargetKind::One) {
        out.set(row, c, Target::zero());
        return;
      }
    }
    throw NoEligibleOneError("row " + std::to_string(row + 1) + " has no 1 outside the pair columns");
  };
  for (const auto& p : r.pairs) {
    fix(p.z.row, p.y.col);
    fix(p.y.row, p.z.col);
  }
  return out;
}

namespace {

// Calls fn(matrix) for every layout of `pairs` Y-special and `pairs` Z-special
// cells (rows increasing, any distinct columns, any Y/Z labelling) and every
// filling of the remaining cells with at most max_zeros zeros.
template <class Fn>
void for_each_special_instance(std::size_t n, std::size_t pairs, std::size_t max_zeros, Fn&& fn) {
  const std::size_t k = 2 * pairs;
  if (pairs == 0 || k > n) throw InvalidParamsError("need 1 <= 2 * pairs <= n");
  std::vector<std::size_t> rows(k), cols(k);
  std::vector<bool> col_used(n, false);

  auto fill = [&](const PartitionMatrix& base) {
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < n * n; ++c) {
      if (!base.cells()[c].is_variable()) free.push_back(c);
    }
    // Subsets of `free` of size <= max_zeros, by increasing index lists.
    std::vector<std::size_t> pick;
    PartitionMatrix m = base;
    auto rec = [&](auto&& self, std::size_t start) -> void {
      fn(m);
      if (pick.size() == max_zeros) return;
      for (std::size_t t = start; t < free.size(); ++t) {
        const std::size_t c = free[t];
        m.set(c / n, c % n, Target::zero());
        pick.push_back(c);
        self(self, t + 1);
        pick.pop_back();
        m.set(c / n, c % n, Target::one());
      }
    };
    rec(rec, 0);
  };

  auto label_and_fill = [&]() {
    // Choose which of the k cells are Y: bitmasks with `pairs` bits.
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != pairs) continue;
      PartitionMatrix base(n);
      std::uint32_t ny = 0, nz = 0;
      for (std::size_t t = 0; t < k; ++t) {
        base.set(rows[t], cols[t], (mask >> t & 1) ? Target::y(++ny) : Target::z(++nz));
      }
      fill(base);
    }
  };

  auto place_cols = [&](auto&& self, std::size_t t) -> void {
    if (t == k) {
      label_and_fill();
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (col_used[c]) continue;
      col_used[c] = true;
      cols[t] = c;
      self(self, t + 1);
      col_used[c] = false;
    }
  };

  auto place_rows = [&](auto&& self, std::size_t t, std::size_t start) -> void {
    if (t == k) {
      place_cols(place_cols, 0);
      return;
    }
    for (std::size_t r = start; r < n; ++r) {
      rows[t] = r;
      self(self, t + 1, r + 1);
    }
  };
  place_rows(place_rows, 0, 0);
}

bool all_blocks_full(const PartitionMatrix& x, const SpecialPositionReport& r) {
  return std::all_of(r.pairs.begin(), r.pairs.end(), [&](const SpecialPair& p) { return block_full_rank(x, p); });
}

}  // namespace

DichotomyScan scan_rank_dichotomy(std::size_t n, std::size_t pairs, std::size_t max_zeros) {
  DichotomyScan out;
  const PrimeField field;
  for_each_special_instance(n, pairs, max_zeros, [&](const PartitionMatrix& x) {
    ++out.instances;
    const auto r = special_positions(x);
    if (!all_blocks_full(x, r) || !r.pair_rows_one_good() || !remainder_perm_nonzero(x, r)) return;
    ++out.checked;
    const std::size_t rank = pd_matrix_of_perm(x, field).rank();
    if (rank < (std::size_t{1} << r.gamma())) {
      ++out.violations;
      if (!out.example) out.example = x;
    }
  });
  return out;
}

SwapScan scan_swap_injectivity(std::size_t n, std::size_t pairs, std::size_t max_zeros) {
  SwapScan out;
  std::map<std::vector<std::pair<int, std::uint32_t>>, PartitionMatrix> seen;
  for_each_special_instance(n, pairs, max_zeros, [&](const PartitionMatrix& x) {
    ++out.instances;
    const auto r = special_positions(x);
    if (all_blocks_full(x, r) || !r.pair_rows_one_good() || !remainder_perm_nonzero(x, r)) return;
    ++out.mapped;
    PartitionMatrix img = swap_to_full_rank(x, r);
    if (!all_blocks_full(img, r)) ++out.not_full_rank;
    std::vector<std::pair<int, std::uint32_t>> key;
    key.reserve(img.cells().size());
    for (const auto& t : img.cells()) key.emplace_back(static_cast<int>(t.kind), t.index);
    auto [it, fresh] = seen.try_emplace(std::move(key), x);
    if (!fresh) {
      ++out.collisions;
      if (!out.example) out.example = std::pair(it->second, x);
    }
  });
  return out;
}

}  // namespace ropbench

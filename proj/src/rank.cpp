#include "ropbench/rank.hpp"

#include <algorithm>
#include <map>
#include <span>
#include <string_view>

#include "ropbench/error.hpp"
#include "ropbench/kernels.hpp"
#include "ropbench/rng.hpp"

namespace ropbench {

std::size_t rank_in_place(const PrimeField& f, std::vector<FieldElem>& a, std::size_t rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv * cols + c].value == 0) ++piv;
    if (piv == rows) continue;
    if (piv != rank) {
      std::swap_ranges(a.begin() + piv * cols + c, a.begin() + piv * cols + cols, a.begin() + rank * cols + c);
    }
    std::span<const FieldElem> prow(a.data() + rank * cols + c, cols - c);
    FieldElem inv = f.inv(a[rank * cols + c]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      FieldElem lead = a[r * cols + c];
      if (lead.value == 0) continue;
      kernels::sub_scaled(f, std::span<FieldElem>(a.data() + r * cols + c, cols - c), prow, f.mul(lead, inv));
    }
    ++rank;
  }
  return rank;
}

RankMatrix::RankMatrix(PrimeField field, std::vector<Var> y_roster, std::vector<Var> z_roster)
    : field_(field), y_(std::move(y_roster)), z_(std::move(z_roster)) {
  if (y_.size() >= 32 || z_.size() >= 32) throw CapError("roster too large for a dense matrix");
  rows_ = std::size_t{1} << y_.size();
  cols_ = std::size_t{1} << z_.size();
  data_.assign(rows_ * cols_, FieldElem{});
}

std::size_t RankMatrix::rank() const {
  if (!rank_) {
    std::vector<FieldElem> copy = data_;
    rank_ = rank_in_place(field_, copy, rows_, cols_);
  }
  return *rank_;
}

namespace {

struct SideSplit {
  std::vector<Var> y, z;
};

SideSplit split_roster(const SparsePoly& p) {
  SideSplit s;
  for (const Var& v : p.roster()) {
    if (v.side == Side::X) throw PreconditionError("matrix needs Y/Z variables only, found " + to_string(v));
    (v.side == Side::Y ? s.y : s.z).push_back(v);
  }
  return s;
}

void check_caps(std::size_t ny, std::size_t nz, const MatrixCaps& caps) {
  if (ny > caps.max_y || nz > caps.max_z) {
    throw CapError("roster " + std::to_string(ny) + "x" + std::to_string(nz) + " exceeds cap " +
                   std::to_string(caps.max_y) + "x" + std::to_string(caps.max_z));
  }
}

// Column of each polynomial roster variable in the matrix rosters, as a bit
// position on its own side.
std::vector<std::size_t> bit_positions(const SparsePoly& p, const std::vector<Var>& ys, const std::vector<Var>& zs) {
  std::vector<std::size_t> bit(p.roster().size());
  for (std::size_t i = 0; i < p.roster().size(); ++i) {
    const Var& v = p.roster()[i];
    const auto& side = v.side == Side::Y ? ys : zs;
    auto it = std::lower_bound(side.begin(), side.end(), v);
    if (it == side.end() || *it != v) throw PreconditionError("roster misses " + to_string(v));
    bit[i] = static_cast<std::size_t>(it - side.begin());
  }
  return bit;
}

}  // namespace

RankMatrix build_pd_matrix(const SparsePoly& p, const MatrixCaps& caps) {
  SideSplit s = split_roster(p);
  return build_pd_matrix(p, std::move(s.y), std::move(s.z), caps);
}

RankMatrix build_pd_matrix(const SparsePoly& p, std::vector<Var> y_roster, std::vector<Var> z_roster,
                           const MatrixCaps& caps) {
  split_roster(p);
  if (!p.is_multilinear()) throw NonMultilinearError("partial derivative matrix needs a multilinear polynomial");
  check_caps(y_roster.size(), z_roster.size(), caps);
  if (!std::is_sorted(y_roster.begin(), y_roster.end()) || !std::is_sorted(z_roster.begin(), z_roster.end())) {
    throw PreconditionError("rosters must be sorted");
  }
  RankMatrix m(p.field(), std::move(y_roster), std::move(z_roster));
  auto bit = bit_positions(p, m.y_roster(), m.z_roster());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto row = p.exponents(t);
    std::size_t r = 0, c = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i]) continue;
      if (p.roster()[i].side == Side::Y) {
        r |= std::size_t{1} << bit[i];
      } else {
        c |= std::size_t{1} << bit[i];
      }
    }
    m.set(r, c, p.coeff(t));
  }
  return m;
}

FieldElem Substitution::at(const Var& v) const {
  auto it = values.find(v);
  if (it == values.end()) throw UnassignedVariableError("substitution does not assign " + to_string(v));
  return it->second;
}

Substitution Substitution::random(const PrimeField& f, const std::vector<Var>& vars, std::uint64_t seed) {
  Substitution s;
  s.seed = seed;
  CounterRng rng(seed);
  for (const Var& v : vars) s.values[v] = f.from_u64(rng.below(f.modulus()));
  return s;
}

RankMatrix build_pcm_at(const SparsePoly& p, const Substitution& s, const MatrixCaps& caps) {
  SideSplit sides = split_roster(p);
  check_caps(sides.y.size(), sides.z.size(), caps);
  const PrimeField& f = p.field();
  std::vector<FieldElem> vals(p.roster().size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f.from_u64(s.at(p.roster()[i]).value);
  RankMatrix m(f, std::move(sides.y), std::move(sides.z));
  auto bit = bit_positions(p, m.y_roster(), m.z_roster());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto row = p.exponents(t);
    std::size_t r = 0, c = 0;
    FieldElem v = p.coeff(t);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i]) continue;
      if (p.roster()[i].side == Side::Y) {
        r |= std::size_t{1} << bit[i];
      } else {
        c |= std::size_t{1} << bit[i];
      }
      if (row[i] > 1) v = f.mul(v, f.pow(vals[i], row[i] - 1u));
    }
    m.add_to(r, c, v);
  }
  return m;
}

std::size_t estimate_maxrank(const SparsePoly& p, std::size_t trials, std::uint64_t seed, const MatrixCaps& caps) {
  if (trials == 0) throw PreconditionError("estimate_maxrank needs at least one trial");
  if (p.is_multilinear()) return build_pd_matrix(p, caps).rank();
  std::size_t best = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto s = Substitution::random(p.field(), p.roster(), CounterRng::derive_seed(seed, t));
    best = std::max(best, build_pcm_at(p, s, caps).rank());
  }
  return best;
}

std::size_t exhaustive_maxrank(const SparsePoly& p) {
  const std::uint64_t P = p.field().modulus();
  const std::size_t w = p.roster().size();
  if (P > 7) throw PreconditionError("exhaustive maxrank needs a field of size at most 7");
  if (w > 4) throw PreconditionError("exhaustive maxrank needs at most 4 variables");
  std::size_t total = 1;
  for (std::size_t i = 0; i < w; ++i) total *= P;
  std::size_t best = 0;
  Substitution s;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < w; ++i) {
      s.values[p.roster()[i]] = FieldElem{c % P};
      c /= P;
    }
    best = std::max(best, build_pcm_at(p, s, MatrixCaps{w, w}).rank());
  }
  return best;
}

std::size_t compact_rank(const SparsePoly& p, std::size_t max_entries) {
  if (p.is_zero()) return 0;
  if (!p.is_multilinear()) throw NonMultilinearError("compact rank needs a multilinear polynomial");
  SideSplit sides = split_roster(p);
  const std::size_t ny = sides.y.size();
  const std::size_t w = p.roster().size();
  // Roster is sorted Y before Z, so each row splits into a Y and a Z part.
  std::map<std::string_view, std::size_t> rows, cols;
  const auto* base = reinterpret_cast<const char*>(p.exponent_data().data());
  std::vector<std::pair<std::size_t, std::size_t>> pos(p.term_count());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    std::string_view yk(base + t * w, ny), zk(base + t * w + ny, w - ny);
    auto ri = rows.emplace(yk, rows.size()).first->second;
    auto ci = cols.emplace(zk, cols.size()).first->second;
    pos[t] = {ri, ci};
  }
  const std::size_t R = rows.size(), C = cols.size();
  if (R > max_entries / C) throw CapError("compact matrix " + std::to_string(R) + "x" + std::to_string(C) + " too large");
  std::vector<FieldElem> a(R * C);
  for (std::size_t t = 0; t < p.term_count(); ++t) a[pos[t].first * C + pos[t].second] = p.coeff(t);
  return R <= C ? rank_in_place(p.field(), a, R, C) : [&] {
    std::vector<FieldElem> tr(R * C);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t c = 0; c < C; ++c) tr[c * R + r] = a[r * C + c];
    return rank_in_place(p.field(), tr, C, R);
  }();
}

namespace {

struct NodeFacts {
  bool has_y = false;
  bool has_z = false;
  bool is_const = false;
  FieldElem value{};
  bool is_zero() const { return is_const && value.value == 0; }
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw CapError("rank overflows 64 bits");
  return a * b;
}

}  // namespace

std::vector<std::uint64_t> node_ranks(const Formula& f, const RankOptions& opt) {
  f.require_read_once();
  const PrimeField& field = f.field();
  const std::size_t n = f.size();
  std::vector<NodeFacts> facts(n);
  for (NodeId i = 0; i < n; ++i) {
    const Node& node = f.node(i);
    NodeFacts& x = facts[i];
    switch (node.op) {
      case Op::Variable:
        if (node.var.side == Side::X) throw PreconditionError("rank needs a partitioned formula; found " + to_string(node.var));
        x.has_y = node.var.side == Side::Y;
        x.has_z = node.var.side == Side::Z;
        break;
      case Op::Constant:
        x.is_const = true;
        x.value = node.value;
        break;
      default: {
        const NodeFacts& l = facts[node.left];
        const NodeFacts& r = facts[node.right];
        x.has_y = l.has_y || r.has_y;
        x.has_z = l.has_z || r.has_z;
        if (node.op == Op::Add) {
          x.is_const = l.is_const && r.is_const;
          if (x.is_const) x.value = field.add(l.value, r.value);
        } else if (l.is_zero() || r.is_zero()) {
          x.is_const = true;
          x.value = field.zero();
        } else {
          x.is_const = l.is_const && r.is_const;
          if (x.is_const) x.value = field.mul(l.value, r.value);
        }
      }
    }
  }

  // Sums that mix Y and Z need their expansion, and so does everything below.
  std::vector<bool> need(n, false);
  for (NodeId i = static_cast<NodeId>(n); i-- > 0;) {
    NodeId p = f.parent(i);
    bool mixing_sum = f.node(i).op == Op::Add && facts[i].has_y && facts[i].has_z && !facts[i].is_const;
    need[i] = mixing_sum || (p != kNoNode && need[p]);
  }

  std::vector<std::uint64_t> rank(n, 0);
  std::vector<std::optional<SparsePoly>> poly(n);
  for (NodeId i = 0; i < n; ++i) {
    const Node& node = f.node(i);
    if (need[i]) {
      switch (node.op) {
        case Op::Variable: poly[i] = SparsePoly::variable(field, node.var); break;
        case Op::Constant: poly[i] = SparsePoly::constant(field, node.value); break;
        default:
          poly[i] = node.op == Op::Add ? poly_add(*poly[node.left], *poly[node.right], opt.term_cap)
                                       : poly_mul(*poly[node.left], *poly[node.right], opt.term_cap);
          poly[node.left].reset();
          poly[node.right].reset();
      }
    }
    const NodeFacts& x = facts[i];
    if (x.is_zero()) {
      rank[i] = 0;
    } else if (!(x.has_y && x.has_z) || x.is_const) {
      rank[i] = 1;
    } else if (node.op == Op::Mul) {
      rank[i] = checked_mul(rank[node.left], rank[node.right]);
    } else {
      rank[i] = compact_rank(*poly[i], opt.max_entries);
    }
  }
  return rank;
}

std::uint64_t formula_rank(const Formula& f, const RankOptions& opt) { return node_ranks(f, opt).back(); }

std::size_t evaluation_rank(const Formula& f, std::size_t R, std::uint64_t seed) {
  if (R == 0) return 0;
  const PrimeField& field = f.field();
  const std::size_t batch = R * R;
  CounterRng rng(seed);
  // Per-variable random coordinates, one per row (Y) or column (Z) point.
  std::unordered_map<Var, std::vector<FieldElem>> coords;
  for (const Var& v : f.leaf_variables()) {
    if (v.side == Side::X) throw PreconditionError("evaluation rank needs a partitioned formula");
    auto& c = coords[v];
    if (!c.empty()) continue;
    c.resize(R);
    for (auto& e : c) e = field.from_u64(rng.below(field.modulus()));
  }
  std::vector<FieldElem> scratch(batch);
  auto values = [&](const Var& v) -> std::span<const FieldElem> {
    const auto& c = coords.at(v);
    for (std::size_t s = 0; s < R; ++s) {
      for (std::size_t t = 0; t < R; ++t) scratch[s * R + t] = v.side == Side::Y ? c[s] : c[t];
    }
    return scratch;
  };
  std::vector<FieldElem> m = f.evaluate_batch(batch, values);
  return rank_in_place(field, m, R, R);
}

namespace {

std::string monomial_label(const std::vector<Var>& roster, std::size_t mask) {
  if (mask == 0) return "1";
  std::string s;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (!(mask >> i & 1)) continue;
    if (!s.empty()) s += '*';
    s += to_string(roster[i]);
  }
  return s;
}

}  // namespace

std::string to_csv(const RankMatrix& m) {
  std::string out = "monomial";
  for (std::size_t c = 0; c < m.cols(); ++c) out += "," + monomial_label(m.z_roster(), c);
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += monomial_label(m.y_roster(), r);
    for (std::size_t c = 0; c < m.cols(); ++c) out += "," + std::to_string(m.at(r, c).value);
    out += '\n';
  }
  return out;
}

}  // namespace ropbench

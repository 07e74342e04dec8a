#include "ropbench/poly.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include <json.hpp>

#include "ropbench/error.hpp"
#include "ropbench/partition.hpp"

namespace ropbench {

SparsePoly SparsePoly::constant(const PrimeField& field, FieldElem c) {
  SparsePoly p(field);
  c = field.from_u64(c.value);
  if (c.value != 0) p.coeffs_.push_back(c);
  return p;
}

SparsePoly SparsePoly::variable(const PrimeField& field, const Var& v) {
  SparsePoly p(field);
  p.roster_.push_back(v);
  p.exps_.push_back(1);
  p.coeffs_.push_back(field.one());
  return p;
}

SparsePoly SparsePoly::from_terms(const PrimeField& field, std::vector<Var> roster, std::vector<std::uint8_t> exps,
                                  std::vector<FieldElem> coeffs) {
  const std::size_t w = roster.size();
  if (exps.size() != coeffs.size() * w) throw PreconditionError("exponent data does not match term count");

  // Sort the roster, permuting exponent columns to match.
  std::vector<std::size_t> col(w);
  std::iota(col.begin(), col.end(), 0);
  std::sort(col.begin(), col.end(), [&](std::size_t a, std::size_t b) { return roster[a] < roster[b]; });
  for (std::size_t i = 1; i < w; ++i) {
    if (roster[col[i]] == roster[col[i - 1]]) throw DuplicateVariableError("roster lists a variable twice");
  }
  std::vector<Var> sorted_roster(w);
  for (std::size_t i = 0; i < w; ++i) sorted_roster[i] = roster[col[i]];

  const std::size_t t = coeffs.size();
  std::vector<std::uint8_t> permuted(t * w);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t i = 0; i < w; ++i) permuted[r * w + i] = exps[r * w + col[i]];
  }

  std::vector<std::size_t> order(t);
  std::iota(order.begin(), order.end(), 0);
  const std::uint8_t* base = permuted.data();
  if (w > 0) {
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::memcmp(base + a * w, base + b * w, w) < 0; });
  }

  SparsePoly out(field);
  std::vector<std::uint8_t> rows;
  std::vector<FieldElem> cs;
  for (std::size_t k = 0; k < t;) {
    FieldElem acc = field.from_u64(coeffs[order[k]].value);
    std::size_t j = k + 1;
    while (j < t && (w == 0 || std::memcmp(base + order[j] * w, base + order[k] * w, w) == 0)) {
      acc = field.add(acc, field.from_u64(coeffs[order[j]].value));
      ++j;
    }
    if (acc.value != 0) {
      rows.insert(rows.end(), base + order[k] * w, base + order[k] * w + w);
      cs.push_back(acc);
    }
    k = j;
  }

  // Drop roster variables that no surviving term uses.
  std::vector<bool> used(w, false);
  for (std::size_t r = 0; r < cs.size(); ++r) {
    for (std::size_t i = 0; i < w; ++i) used[i] = used[i] || rows[r * w + i] != 0;
  }
  std::size_t kept = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  if (kept == w) {
    out.roster_ = std::move(sorted_roster);
    out.exps_ = std::move(rows);
  } else {
    for (std::size_t i = 0; i < w; ++i) {
      if (used[i]) out.roster_.push_back(sorted_roster[i]);
    }
    out.exps_.reserve(cs.size() * kept);
    for (std::size_t r = 0; r < cs.size(); ++r) {
      for (std::size_t i = 0; i < w; ++i) {
        if (used[i]) out.exps_.push_back(rows[r * w + i]);
      }
    }
    // Removing all-zero columns cannot break strict row order.
  }
  out.coeffs_ = std::move(cs);
  return out;
}

FieldElem SparsePoly::constant_term() const {
  // The all-zero row sorts first.
  if (coeffs_.empty()) return field_.zero();
  auto row = exponents(0);
  bool zero = std::all_of(row.begin(), row.end(), [](std::uint8_t e) { return e == 0; });
  return zero ? coeffs_[0] : field_.zero();
}

bool SparsePoly::is_multilinear() const {
  return std::all_of(exps_.begin(), exps_.end(), [](std::uint8_t e) { return e <= 1; });
}

std::size_t SparsePoly::count_side(Side s) const {
  return static_cast<std::size_t>(
      std::count_if(roster_.begin(), roster_.end(), [s](const Var& v) { return v.side == s; }));
}

FieldElem SparsePoly::evaluate(const std::function<FieldElem(const Var&)>& point) const {
  std::vector<FieldElem> vals(roster_.size());
  for (std::size_t i = 0; i < roster_.size(); ++i) vals[i] = field_.from_u64(point(roster_[i]).value);
  FieldElem sum = field_.zero();
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    FieldElem term = coeffs_[t];
    auto row = exponents(t);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i]) term = field_.mul(term, field_.pow(vals[i], row[i]));
    }
    sum = field_.add(sum, term);
  }
  return sum;
}

namespace {

std::vector<Var> roster_union(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<Var> u;
  u.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

// Position of each variable of `sub` inside `super` (both sorted).
std::vector<std::size_t> embed(const std::vector<Var>& sub, const std::vector<Var>& super) {
  std::vector<std::size_t> pos(sub.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    while (super[j] != sub[i]) ++j;
    pos[i] = j;
  }
  return pos;
}

void check_fields(const SparsePoly& p, const SparsePoly& q) {
  if (!(p.field() == q.field())) throw PreconditionError("polynomials over different fields");
}

}  // namespace

SparsePoly poly_add(const SparsePoly& p, const SparsePoly& q, std::size_t cap) {
  check_fields(p, q);
  if (q.is_zero()) return p;
  if (p.is_zero()) return q;
  std::vector<Var> roster = roster_union(p.roster(), q.roster());
  const std::size_t w = roster.size();
  std::vector<std::uint8_t> exps((p.term_count() + q.term_count()) * w, 0);
  std::vector<FieldElem> coeffs;
  coeffs.reserve(p.term_count() + q.term_count());
  std::size_t r = 0;
  for (const SparsePoly* s : {&p, &q}) {
    auto pos = embed(s->roster(), roster);
    for (std::size_t t = 0; t < s->term_count(); ++t, ++r) {
      auto row = s->exponents(t);
      for (std::size_t i = 0; i < row.size(); ++i) exps[r * w + pos[i]] = row[i];
      coeffs.push_back(s->coeff(t));
    }
  }
  SparsePoly out = SparsePoly::from_terms(p.field(), std::move(roster), std::move(exps), std::move(coeffs));
  if (out.term_count() > cap) throw BlowUpError("sum exceeds term cap " + std::to_string(cap));
  return out;
}

SparsePoly poly_neg(const SparsePoly& p) {
  std::vector<FieldElem> cs = p.coeffs();
  for (auto& c : cs) c = p.field().neg(c);
  return SparsePoly::from_terms(p.field(), p.roster(), p.exponent_data(), std::move(cs));
}

SparsePoly poly_mul(const SparsePoly& p, const SparsePoly& q, std::size_t cap) {
  check_fields(p, q);
  const PrimeField& f = p.field();
  if (p.is_zero() || q.is_zero()) return SparsePoly(f);
  if (p.is_constant() || q.is_constant()) {
    const SparsePoly& c = p.is_constant() ? p : q;
    const SparsePoly& other = p.is_constant() ? q : p;
    std::vector<FieldElem> cs = other.coeffs();
    for (auto& x : cs) x = f.mul(x, c.coeff(0));
    return SparsePoly::from_terms(f, other.roster(), other.exponent_data(), std::move(cs));
  }
  const std::size_t tp = p.term_count(), tq = q.term_count();
  if (tp > cap / tq) {
    throw BlowUpError("product of " + std::to_string(tp) + " and " + std::to_string(tq) + " terms exceeds cap " +
                      std::to_string(cap));
  }
  std::vector<Var> roster = roster_union(p.roster(), q.roster());
  const std::size_t w = roster.size();
  auto pos_p = embed(p.roster(), roster);
  auto pos_q = embed(q.roster(), roster);
  std::vector<std::uint8_t> exps(tp * tq * w, 0);
  std::vector<FieldElem> coeffs(tp * tq);
  std::vector<std::uint8_t> rowp(w);
  std::size_t r = 0;
  for (std::size_t a = 0; a < tp; ++a) {
    std::fill(rowp.begin(), rowp.end(), 0);
    auto ea = p.exponents(a);
    for (std::size_t i = 0; i < ea.size(); ++i) rowp[pos_p[i]] = ea[i];
    for (std::size_t b = 0; b < tq; ++b, ++r) {
      std::uint8_t* dst = exps.data() + r * w;
      std::memcpy(dst, rowp.data(), w);
      auto eb = q.exponents(b);
      for (std::size_t i = 0; i < eb.size(); ++i) {
        unsigned e = unsigned(dst[pos_q[i]]) + eb[i];
        if (e > 255) throw CapError("exponent exceeds 255");
        dst[pos_q[i]] = static_cast<std::uint8_t>(e);
      }
      coeffs[r] = f.mul(p.coeff(a), q.coeff(b));
    }
  }
  return SparsePoly::from_terms(f, std::move(roster), std::move(exps), std::move(coeffs));
}

SparsePoly expand_subtree(const Formula& f, NodeId id, std::size_t cap) {
  const NodeId begin = f.subtree_begin(id);
  // Post-order value stack, as in formula evaluation.
  std::vector<SparsePoly> stack;
  for (NodeId k = begin; k <= id; ++k) {
    const Node& n = f.node(k);
    switch (n.op) {
      case Op::Variable: stack.push_back(SparsePoly::variable(f.field(), n.var)); break;
      case Op::Constant: stack.push_back(SparsePoly::constant(f.field(), n.value)); break;
      default: {
        SparsePoly r = std::move(stack.back());
        stack.pop_back();
        SparsePoly& l = stack.back();
        l = n.op == Op::Add ? poly_add(l, r, cap) : poly_mul(l, r, cap);
      }
    }
  }
  return std::move(stack.back());
}

SparsePoly expand(const Formula& f, std::size_t cap) { return expand_subtree(f, f.root(), cap); }

bool is_multilinear(const SparsePoly& p) { return p.is_multilinear(); }

SparsePoly apply_partition(const SparsePoly& p, const Partition& phi) {
  const PrimeField& f = p.field();
  const std::size_t w = p.roster().size();
  std::vector<Target> tg(w);
  for (std::size_t i = 0; i < w; ++i) tg[i] = phi.at(p.roster()[i]);

  // New roster: the Y/Z images, in the order of first appearance.
  std::vector<Var> roster;
  std::vector<std::size_t> col(w, SIZE_MAX);
  for (std::size_t i = 0; i < w; ++i) {
    if (tg[i].is_variable()) {
      col[i] = roster.size();
      roster.push_back(tg[i].as_var());
    }
  }
  const std::size_t nw = roster.size();
  std::vector<std::uint8_t> exps;
  std::vector<FieldElem> coeffs;
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto row = p.exponents(t);
    bool dead = false;
    for (std::size_t i = 0; i < w && !dead; ++i) dead = row[i] != 0 && tg[i].kind == TargetKind::Zero;
    if (dead) continue;
    std::size_t off = exps.size();
    exps.resize(off + nw, 0);
    for (std::size_t i = 0; i < w; ++i) {
      if (col[i] != SIZE_MAX) exps[off + col[i]] = row[i];
    }
    coeffs.push_back(p.coeff(t));
  }
  return SparsePoly::from_terms(f, std::move(roster), std::move(exps), std::move(coeffs));
}

namespace {

std::string hex_mask(const std::vector<bool>& bits) {
  if (bits.empty()) return "0";
  std::string s;
  for (std::size_t nib = (bits.size() + 3) / 4; nib-- > 0;) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      std::size_t i = nib * 4 + b;
      if (i < bits.size() && bits[i]) v |= 1u << b;
    }
    s += "0123456789abcdef"[v];
  }
  auto nz = s.find_first_not_of('0');
  return nz == std::string::npos ? "0" : s.substr(nz);
}

}  // namespace

std::string dump(const SparsePoly& p) {
  nlohmann::ordered_json header;
  header["field"] = p.field().modulus();
  header["terms"] = p.term_count();
  std::vector<std::string> all, ys, zs, xs;
  for (const Var& v : p.roster()) {
    all.push_back(to_string(v));
    (v.side == Side::Y ? ys : v.side == Side::Z ? zs : xs).push_back(to_string(v));
  }
  header["roster"] = all;
  header["x"] = xs;
  header["y"] = ys;
  header["z"] = zs;
  std::string out = header.dump() + "\n";
  const std::size_t nx = xs.size(), ny = ys.size(), nz = zs.size();
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto row = p.exponents(t);
    std::vector<bool> ym(ny), zm(nz);
    for (std::size_t i = 0; i < ny; ++i) ym[i] = row[nx + i] != 0;
    for (std::size_t i = 0; i < nz; ++i) zm[i] = row[nx + ny + i] != 0;
    out += std::to_string(p.coeff(t).value);
    out += ' ';
    out += hex_mask(ym);
    out += ' ';
    out += hex_mask(zm);
    for (std::uint8_t e : row) {
      out += ' ';
      out += std::to_string(e);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ropbench

#include "ropbench/formula.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "ropbench/error.hpp"
#include "ropbench/kernels.hpp"

namespace ropbench {

// ---------------------------------------------------------------- builder

NodeId FormulaBuilder::variable(Var v) {
  Node n;
  n.op = Op::Variable;
  n.var = v;
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId FormulaBuilder::constant(FieldElem c) {
  Node n;
  n.op = Op::Constant;
  n.value = field_.from_u64(c.value);
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId FormulaBuilder::gate(Op op, NodeId l, NodeId r) {
  if (op != Op::Add && op != Op::Mul) throw PreconditionError("gate op must be + or *");
  if (l >= nodes_.size() || r >= nodes_.size()) throw PreconditionError("gate child out of range");
  Node n;
  n.op = op;
  n.left = l;
  n.right = r;
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId FormulaBuilder::sum(std::span<const NodeId> operands) {
  if (operands.empty()) throw PreconditionError("empty sum");
  NodeId acc = operands.back();
  for (std::size_t i = operands.size() - 1; i-- > 0;) acc = add(operands[i], acc);
  return acc;
}

NodeId FormulaBuilder::product(std::span<const NodeId> operands) {
  if (operands.empty()) throw PreconditionError("empty product");
  NodeId acc = operands.back();
  for (std::size_t i = operands.size() - 1; i-- > 0;) acc = mul(operands[i], acc);
  return acc;
}

NodeId FormulaBuilder::copy_from(const Formula& f, NodeId id) {
  std::vector<NodeId> mapped(id + 1 - f.subtree_begin(id));
  NodeId base = f.subtree_begin(id);
  for (NodeId k = base; k <= id; ++k) {
    const Node& n = f.node(k);
    NodeId out;
    switch (n.op) {
      case Op::Variable: out = variable(n.var); break;
      case Op::Constant: out = constant(n.value); break;
      default: out = gate(n.op, mapped[n.left - base], mapped[n.right - base]); break;
    }
    mapped[k - base] = out;
  }
  return mapped.back();
}

Formula FormulaBuilder::build(NodeId root) const {
  Formula f = build(root, {});
  std::vector<Var> vars = f.leaf_variables();
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  f.universe_ = std::move(vars);
  return f;
}

Formula FormulaBuilder::build(NodeId root, std::vector<Var> universe) const {
  if (root >= nodes_.size()) throw PreconditionError("root out of range");
  Formula f;
  f.field_ = field_;
  f.nodes_.clear();
  // Iterative post-order copy; builder ids may be shared, in which case the
  // subtree is duplicated.
  struct Frame {
    NodeId id;
    bool expanded;
  };
  std::vector<Frame> stack{{root, false}};
  std::vector<NodeId> results;
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const Node& n = nodes_[fr.id];
    if (n.is_leaf()) {
      f.nodes_.push_back(n);
      results.push_back(static_cast<NodeId>(f.nodes_.size() - 1));
    } else if (!fr.expanded) {
      stack.push_back({fr.id, true});
      stack.push_back({n.right, false});
      stack.push_back({n.left, false});
    } else {
      Node g = n;
      g.right = results.back();
      results.pop_back();
      g.left = results.back();
      results.pop_back();
      f.nodes_.push_back(g);
      results.push_back(static_cast<NodeId>(f.nodes_.size() - 1));
    }
  }
  f.finish();
  if (!universe.empty()) {
    std::unordered_set<Var> known(universe.begin(), universe.end());
    if (known.size() != universe.size()) throw DuplicateVariableError("universe lists a variable twice");
    for (const Node& n : f.nodes_) {
      if (n.op == Op::Variable && !known.count(n.var)) {
        throw PreconditionError("leaf " + to_string(n.var) + " missing from universe");
      }
    }
  }
  f.universe_ = std::move(universe);
  return f;
}

// ---------------------------------------------------------------- formula

void Formula::finish() {
  parents_.assign(nodes_.size(), kNoNode);
  begin_.resize(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.is_gate()) {
      parents_[n.left] = i;
      parents_[n.right] = i;
      begin_[i] = begin_[n.left];
    } else {
      begin_[i] = i;
    }
  }
}

std::vector<Var> Formula::leaf_variables() const {
  std::vector<Var> out;
  for (const Node& n : nodes_) {
    if (n.op == Op::Variable) out.push_back(n.var);
  }
  return out;
}

std::size_t Formula::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::Variable; }));
}

bool Formula::is_read_once() const {
  std::unordered_set<Var> seen;
  for (const Node& n : nodes_) {
    if (n.op == Op::Variable && !seen.insert(n.var).second) return false;
  }
  return true;
}

void Formula::require_read_once() const {
  std::unordered_set<Var> seen;
  for (const Node& n : nodes_) {
    if (n.op == Op::Variable && !seen.insert(n.var).second) {
      throw DuplicateVariableError("variable " + to_string(n.var) + " occurs more than once");
    }
  }
}

bool Formula::is_constant_minimal() const {
  for (const Node& n : nodes_) {
    if (n.is_gate() && nodes_[n.left].op == Op::Constant && nodes_[n.right].op == Op::Constant) return false;
  }
  return true;
}

std::size_t Formula::depth() const {
  std::vector<std::size_t> h(nodes_.size(), 0);
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.is_gate()) h[i] = 1 + std::max(h[n.left], h[n.right]);
  }
  return h.back();
}

Formula Formula::subformula(NodeId id) const {
  FormulaBuilder b(field_);
  NodeId r = b.copy_from(*this, id);
  return b.build(r);
}

FieldElem Formula::evaluate(const std::unordered_map<Var, FieldElem>& point) const {
  return evaluate([&](const Var& v) {
    auto it = point.find(v);
    if (it == point.end()) throw UnassignedVariableError("no value for " + to_string(v));
    return it->second;
  });
}

FieldElem Formula::evaluate(const std::function<FieldElem(const Var&)>& point) const {
  std::vector<FieldElem> val(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Variable: val[i] = field_.from_u64(point(n.var).value); break;
      case Op::Constant: val[i] = n.value; break;
      case Op::Add: val[i] = field_.add(val[n.left], val[n.right]); break;
      case Op::Mul: val[i] = field_.mul(val[n.left], val[n.right]); break;
    }
  }
  return val.back();
}

std::vector<FieldElem> Formula::evaluate_batch(
    std::size_t batch, const std::function<std::span<const FieldElem>(const Var&)>& values) const {
  // Post-order means a value stack suffices: the stack never holds more than
  // depth + 1 vectors.
  std::vector<std::vector<FieldElem>> stack;
  std::vector<std::vector<FieldElem>> pool;
  auto fresh = [&]() {
    if (pool.empty()) return std::vector<FieldElem>(batch);
    auto v = std::move(pool.back());
    pool.pop_back();
    return v;
  };
  for (const Node& n : nodes_) {
    switch (n.op) {
      case Op::Variable: {
        auto src = values(n.var);
        if (src.size() != batch) throw PreconditionError("batch size mismatch for " + to_string(n.var));
        auto v = fresh();
        std::copy(src.begin(), src.end(), v.begin());
        stack.push_back(std::move(v));
        break;
      }
      case Op::Constant: {
        auto v = fresh();
        std::fill(v.begin(), v.end(), n.value);
        stack.push_back(std::move(v));
        break;
      }
      case Op::Add:
      case Op::Mul: {
        auto r = std::move(stack.back());
        stack.pop_back();
        auto& l = stack.back();
        if (n.op == Op::Add) {
          kernels::add(field_, l, r);
        } else {
          kernels::mul(field_, l, r);
        }
        pool.push_back(std::move(r));
        break;
      }
    }
  }
  return std::move(stack.back());
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, FormulaBuilder& b) : text_(text), b_(b) {}

  NodeId parse_top() {
    skip_ws();
    if (at_end()) fail("empty input");
    NodeId r = parse_expr();
    skip_ws();
    if (!at_end()) fail("trailing input");
    return r;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {  // comment to end of line
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, col_, what); }

  NodeId parse_expr() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char c = peek();
    if (c == '(') return parse_form();
    if (c == ')') fail("unexpected ')'");
    return parse_atom();
  }

  NodeId parse_form() {
    advance();  // '('
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    Op op;
    if (peek() == '+') {
      op = Op::Add;
    } else if (peek() == '*') {
      op = Op::Mul;
    } else {
      fail(std::string("expected '+' or '*', found '") + peek() + "'");
    }
    advance();
    if (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' ) {
      fail("expected whitespace after operator");
    }
    std::vector<NodeId> operands;
    for (;;) {
      skip_ws();
      if (at_end()) fail("missing ')'");
      if (peek() == ')') break;
      operands.push_back(parse_expr());
    }
    if (operands.empty()) fail("operator needs at least one operand");
    advance();  // ')'
    return op == Op::Add ? b_.sum(operands) : b_.product(operands);
  }

  NodeId parse_atom() {
    std::size_t line = line_, col = col_;
    std::size_t start = pos_;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' && peek() != ')' &&
           peek() != ';') {
      advance();
    }
    std::string_view tok = text_.substr(start, pos_ - start);
    char c = tok[0];
    if (c == 'x' || c == 'y' || c == 'z') {
      try {
        return b_.variable(parse_var(tok));
      } catch (const InvalidParamsError&) {
        throw ParseError(line, col, "bad variable '" + std::string(tok) + "'");
      }
    }
    bool neg = false;
    std::string_view digits = tok;
    if (c == '-') {
      neg = true;
      digits = tok.substr(1);
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char d) { return d >= '0' && d <= '9'; })) {
      throw ParseError(line, col, "bad token '" + std::string(tok) + "'");
    }
    // Reduce digit by digit so arbitrarily long literals are accepted.
    const PrimeField& f = b_.field();
    FieldElem v = f.zero();
    FieldElem ten = f.from_u64(10);
    for (char d : digits) v = f.add(f.mul(v, ten), f.from_u64(static_cast<std::uint64_t>(d - '0')));
    return b_.constant(neg ? f.neg(v) : v);
  }

  std::string_view text_;
  FormulaBuilder& b_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

void print(const Formula& f, NodeId id, std::string& out) {
  const Node& n = f.node(id);
  switch (n.op) {
    case Op::Variable: out += to_string(n.var); break;
    case Op::Constant: out += std::to_string(n.value.value); break;
    default:
      out += n.op == Op::Add ? "(+ " : "(* ";
      print(f, n.left, out);
      out += ' ';
      print(f, n.right, out);
      out += ')';
  }
}

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  FormulaBuilder b(options.field);
  Parser p(text, b);
  NodeId root = p.parse_top();
  Formula f = b.build(root);
  if (options.read_once) f.require_read_once();
  return f;
}

std::string to_string(const Formula& f) {
  std::string out;
  print(f, f.root(), out);
  return out;
}

// ---------------------------------------------------------------- measures

Formula normalize_constant_minimal(const Formula& f) {
  const PrimeField& field = f.field();
  FormulaBuilder b(field);
  std::vector<NodeId> mapped(f.size());
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    switch (n.op) {
      case Op::Variable: mapped[i] = b.variable(n.var); break;
      case Op::Constant: mapped[i] = b.constant(n.value); break;
      default: {
        const Node& l = b.node(mapped[n.left]);
        const Node& r = b.node(mapped[n.right]);
        if (l.op == Op::Constant && r.op == Op::Constant) {
          FieldElem v = n.op == Op::Add ? field.add(l.value, r.value) : field.mul(l.value, r.value);
          mapped[i] = b.constant(v);
        } else {
          mapped[i] = b.gate(n.op, mapped[n.left], mapped[n.right]);
        }
      }
    }
  }
  return b.build(mapped.back(), f.universe());
}

Formula simplify_constants(const Formula& f) {
  const PrimeField& field = f.field();
  FormulaBuilder b(field);
  std::vector<NodeId> mapped(f.size());
  auto is_const = [&](NodeId id, std::uint64_t v) {
    const Node& n = b.node(id);
    return n.op == Op::Constant && n.value.value == v;
  };
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    if (n.op == Op::Variable) {
      mapped[i] = b.variable(n.var);
      continue;
    }
    if (n.op == Op::Constant) {
      mapped[i] = b.constant(n.value);
      continue;
    }
    NodeId l = mapped[n.left], r = mapped[n.right];
    const Node& ln = b.node(l);
    const Node& rn = b.node(r);
    if (ln.op == Op::Constant && rn.op == Op::Constant) {
      mapped[i] = b.constant(n.op == Op::Add ? field.add(ln.value, rn.value) : field.mul(ln.value, rn.value));
    } else if (n.op == Op::Add) {
      mapped[i] = is_const(l, 0) ? r : is_const(r, 0) ? l : b.add(l, r);
    } else if (is_const(l, 0) || is_const(r, 0)) {
      mapped[i] = b.constant(field.zero());
    } else {
      mapped[i] = is_const(l, 1) ? r : is_const(r, 1) ? l : b.mul(l, r);
    }
  }
  return b.build(mapped.back(), f.universe());
}

GateCensus classify_gates(const Formula& f) {
  GateCensus g;
  for (const Node& n : f.nodes()) {
    if (n.op == Op::Variable) {
      ++g.variables;
      continue;
    }
    if (!n.is_gate()) continue;
    const Node& l = f.node(n.left);
    const Node& r = f.node(n.right);
    int vars = (l.op == Op::Variable) + (r.op == Op::Variable);
    int gates = l.is_gate() + r.is_gate();
    if (vars == 2) {
      (n.op == Op::Add ? g.a : g.b)++;
    } else if (vars == 1 && gates == 1) {
      (n.op == Op::Add ? g.c : g.d)++;
    }
  }
  return g;
}

std::vector<bool> top_sum_layer(const Formula& f) {
  std::vector<bool> top(f.size(), false);
  // Parents come after children, so walk from the root downwards.
  for (NodeId i = static_cast<NodeId>(f.size()); i-- > 0;) {
    if (f.node(i).op != Op::Add) continue;
    NodeId p = f.parent(i);
    top[i] = p == kNoNode || top[p];
  }
  return top;
}

std::size_t sum_fanin_measure(const Formula& f) {
  std::vector<bool> top = top_sum_layer(f);
  // count[i] = variable leaves in subtree(i) whose parent is a + gate
  std::vector<std::size_t> count(f.size(), 0);
  std::size_t best = 0;
  for (NodeId i = 0; i < f.size(); ++i) {
    const Node& n = f.node(i);
    if (!n.is_gate()) continue;
    count[i] = count[n.left] + count[n.right];
    if (n.op == Op::Add) {
      count[i] += (f.node(n.left).op == Op::Variable) + (f.node(n.right).op == Op::Variable);
      if (!top[i]) best = std::max(best, count[i]);
    }
  }
  return best;
}

bool is_flat_top(const Formula& f, NodeId id) {
  const Node& n = f.node(id);
  if (!n.is_gate()) return false;
  NodeId p = f.parent(id);
  return p == kNoNode || f.node(p).op != n.op;
}

std::vector<NodeId> flat_operands(const Formula& f, NodeId id) {
  std::vector<NodeId> out;
  Op op = f.node(id).op;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId k = stack.back();
    stack.pop_back();
    const Node& n = f.node(k);
    if (n.op == op) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    } else {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<NodeId> depth1_gates(const Formula& f) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < f.size(); ++i) {
    if (!is_flat_top(f, i)) continue;
    auto ops = flat_operands(f, i);
    if (std::all_of(ops.begin(), ops.end(), [&](NodeId k) { return f.node(k).is_leaf(); })) out.push_back(i);
  }
  return out;
}

}  // namespace ropbench

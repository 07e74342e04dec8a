#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ropbench/field.hpp"
#include "ropbench/var.hpp"

namespace ropbench {

enum class Op : std::uint8_t { Variable, Constant, Add, Mul };

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

struct Node {
  Op op = Op::Constant;
  Var var{};           // Variable leaves
  FieldElem value{};   // Constant leaves
  NodeId left = kNoNode;
  NodeId right = kNoNode;

  bool is_leaf() const { return op == Op::Variable || op == Op::Constant; }
  bool is_gate() const { return op == Op::Add || op == Op::Mul; }
};

class Formula;

// Scratch arena for assembling formulas. Node ids are only meaningful for the
// builder that produced them; build() copies the tree reachable from a root
// into a compact, immutable Formula.
class FormulaBuilder {
 public:
  explicit FormulaBuilder(PrimeField field = {}) : field_(field) {}

  NodeId variable(Var v);
  NodeId constant(FieldElem c);
  NodeId constant_i64(std::int64_t c) { return constant(field_.from_i64(c)); }
  NodeId add(NodeId l, NodeId r) { return gate(Op::Add, l, r); }
  NodeId mul(NodeId l, NodeId r) { return gate(Op::Mul, l, r); }
  NodeId gate(Op op, NodeId l, NodeId r);
  // Right-folded chains: a + (b + (c + ...)). Operands must be non-empty.
  NodeId sum(std::span<const NodeId> operands);
  NodeId product(std::span<const NodeId> operands);
  // Copies the subtree of `f` rooted at `id` into this builder.
  NodeId copy_from(const Formula& f, NodeId id);

  // Universe defaults to the sorted distinct leaf variables.
  Formula build(NodeId root) const;
  Formula build(NodeId root, std::vector<Var> universe) const;

  const PrimeField& field() const { return field_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }

 private:
  PrimeField field_;
  std::vector<Node> nodes_;
};

// Binary arithmetic formula. Nodes are stored in post-order (left subtree,
// right subtree, node), so children precede parents, leaves appear in
// left-to-right order, and the root is the last node.
class Formula {
 public:
  Formula() = default;  // the constant 0

  NodeId root() const { return static_cast<NodeId>(nodes_.size() - 1); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  NodeId parent(NodeId id) const { return parents_[id]; }
  const std::vector<Var>& universe() const { return universe_; }
  const PrimeField& field() const { return field_; }

  // Leaf variables in left-to-right order.
  std::vector<Var> leaf_variables() const;
  std::size_t leaf_count() const;
  bool is_read_once() const;
  // Throws DuplicateVariableError naming the first repeated variable.
  void require_read_once() const;
  bool is_constant_minimal() const;
  // Number of edges on the longest root-to-leaf path.
  std::size_t depth() const;
  // First node id of the subtree rooted at id (subtrees are contiguous).
  NodeId subtree_begin(NodeId id) const { return begin_[id]; }
  bool in_subtree(NodeId id, NodeId ancestor) const { return id >= begin_[ancestor] && id <= ancestor; }

  Formula subformula(NodeId id) const;

  // Throws UnassignedVariableError if a leaf has no value.
  FieldElem evaluate(const std::unordered_map<Var, FieldElem>& point) const;
  FieldElem evaluate(const std::function<FieldElem(const Var&)>& point) const;
  // Evaluates at `batch` points at once. values(v) must return a span of
  // `batch` elements for each leaf variable v.
  std::vector<FieldElem> evaluate_batch(std::size_t batch,
                                        const std::function<std::span<const FieldElem>(const Var&)>& values) const;

 private:
  friend class FormulaBuilder;
  void finish();

  PrimeField field_;
  std::vector<Node> nodes_{Node{}};
  std::vector<NodeId> parents_{kNoNode};
  std::vector<NodeId> begin_{0};
  std::vector<Var> universe_;
};

struct ParseOptions {
  bool read_once = false;
  PrimeField field{};
};

// Grammar: expr := var | const | "(" op expr+ ")", op := "+" | "*".
// Variables are x<i>, x<i>_<j>, y<i>, z<i>; constants are decimal integers
// with an optional leading '-', reduced into the field. A form with more than
// two operands folds to the right; a single operand is returned as is.
Formula parse_formula(std::string_view text, const ParseOptions& options = {});
// Fully parenthesized binary form.
std::string to_string(const Formula& f);

Formula normalize_constant_minimal(const Formula& f);
// Folds constant subtrees and drops the identities 0+g, 1*g; 0*g becomes 0.
// The computed polynomial is unchanged.
Formula simplify_constants(const Formula& f);

// Gate census over the four variable-child types. Gates with a variable child
// and a constant child are not typed.
struct GateCensus {
  std::size_t a = 0;  // + with two variable children
  std::size_t b = 0;  // * with two variable children
  std::size_t c = 0;  // + with one variable child and one gate child
  std::size_t d = 0;  // * with one variable child and one gate child
  std::size_t variables = 0;

  friend bool operator==(const GateCensus&, const GateCensus&) = default;
};
GateCensus classify_gates(const Formula& f);

// Top layer: + gates whose path to the root passes through + gates only.
std::vector<bool> top_sum_layer(const Formula& f);
// Max over + gates outside the top layer of the number of variable leaves in
// the gate's subtree whose parent is a + gate; 0 if there is no such gate.
std::size_t sum_fanin_measure(const Formula& f);

// Flattened view: a gate together with all descendants reachable through
// gates of the same operation forms one n-ary gate. A gate is the top of its
// flat gate when its parent is absent or has a different op.
bool is_flat_top(const Formula& f, NodeId id);
// Operands of the flat gate topped at id, left to right.
std::vector<NodeId> flat_operands(const Formula& f, NodeId id);
// Flat gates all of whose operands are leaves.
std::vector<NodeId> depth1_gates(const Formula& f);

}  // namespace ropbench

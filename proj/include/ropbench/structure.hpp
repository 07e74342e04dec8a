#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ropbench/formula.hpp"
#include "ropbench/partition.hpp"
#include "ropbench/permanent.hpp"
#include "ropbench/rank.hpp"
#include "ropbench/rng.hpp"

namespace ropbench {

using BigInt = boost::multiprecision::cpp_int;

// ------------------------------------------------------------ value trees

// Binary tree with positive integer leaves and +/* gates. Children precede
// their parents; the last node added is the root.
class MonotoneValueTree {
 public:
  enum class Kind : std::uint8_t { Leaf, Add, Mul };
  struct Node {
    Kind kind = Kind::Leaf;
    BigInt label = 1;  // leaves only
    std::uint32_t left = 0, right = 0;
  };

  MonotoneValueTree() = default;

  std::uint32_t leaf(BigInt label);
  std::uint32_t add(std::uint32_t l, std::uint32_t r) { return gate(Kind::Add, l, r); }
  std::uint32_t mul(std::uint32_t l, std::uint32_t r) { return gate(Kind::Mul, l, r); }
  std::uint32_t gate(Kind k, std::uint32_t l, std::uint32_t r);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t leaf_count() const;
  BigInt max_leaf() const;
  // Value of every node, by id.
  std::vector<BigInt> values() const;
  BigInt value() const;
  std::string to_string() const;

 private:
  std::vector<Node> nodes_;
};

// Constants become 1. In every flattened gate, the variable leaf operands are
// merged into a single leaf labelled with the rank of their sum (2 if both Y
// and Z occur, else 1) or product (1). Other operands are kept.
MonotoneValueTree monotone_abstraction(const Formula& fphi);

// value(G) <= N^(leaf count) with N = max(2, largest leaf), or the given N.
bool value_bound_check(const MonotoneValueTree& g);
bool value_bound_check(const MonotoneValueTree& g, const BigInt& N);

// Leaves of value 2 and + nodes of value 2 whose children both have value 1.
std::size_t count_value_separators(const MonotoneValueTree& g);
// True iff the separator count s satisfies s >= r / log2(N), checked exactly
// as N^s >= 2^r. N defaults to max(2, leaf count). Throws PreconditionError
// unless value(G) > 2^r.
bool separator_count_bound(const MonotoneValueTree& g, std::uint64_t r);
bool separator_count_bound(const MonotoneValueTree& g, std::uint64_t r, const BigInt& N);

// Random tree with `leaves` leaves labelled 1 or 2 (2 with prob_two).
MonotoneValueTree random_monotone_tree(std::size_t leaves, double prob_two, double add_prob, CounterRng& rng);

// ------------------------------------------------------------ separators

struct Separator {
  NodeId node = kNoNode;  // binary + gate, or the top of a flattened + gate
  bool merged_leaf = false;

  friend bool operator==(const Separator&, const Separator&) = default;
};

// Binary + gates of rank 2 whose children both have rank 1, followed by the
// rank-2 merged leaves of the monotone abstraction that contain no such gate.
// Ranks come from node_ranks (each sum expanded only below itself).
std::vector<Separator> find_rank12_separators(const Formula& fphi, const RankOptions& opt = {});

// ------------------------------------------------------------ depth-1 blocks

struct Depth1Blocks {
  std::vector<std::vector<Var>> blocks;
  bool has_residual = false;  // last block is below the floor
  std::size_t floor = 0;
  std::size_t oversized = 0;  // blocks above 2 * floor (single sets that were already too big)
};

// Variable sets of the depth-1 + gates (flattened), one set per separator
// subtree (first containing separator in list order) plus one per remaining
// gate, ordered by position in the formula, then merged greedily first-fit:
// a set of size >= L stands alone; smaller sets accumulate until the
// accumulator reaches L. A leftover accumulator is the flagged residual.
// Constant leaves are not part of any set.
Depth1Blocks extract_depth1_blocks(const Formula& f, const std::vector<Separator>& separators, std::size_t L);
// The greedy merge step on its own.
Depth1Blocks merge_blocks(const std::vector<std::vector<Var>>& sets, std::size_t L);

struct BlockClasses {
  std::size_t x2 = 0, x3 = 0, x4 = 0, x5 = 0, x6 = 0;
  std::size_t unclassified = 0;

  std::size_t low_sum() const { return x2 + x3 + x4 + x5; }
  // |X2| + |X3| + 2(|X4| + |X5|)
  std::size_t separator_cap() const { return x2 + x3 + 2 * (x4 + x5); }
  friend bool operator==(const BlockClasses&, const BlockClasses&) = default;
};

BlockClasses classify_blocks(const Depth1Blocks& blocks, const Partition& phi);

// ------------------------------------------------------------ census bound

struct CensusBound {
  std::size_t a_low = 0;   // type-A gates of rank below 2 under phi
  std::size_t a_high = 0;  // type-A gates of rank 2
  std::size_t b = 0, c = 0, d = 0;

  // Twice the exponent a'' + a'/2 + b + c/2, an integer.
  std::uint64_t twice_exponent() const { return 2 * a_high + a_low + 2 * b + c; }
  // rank <= 2^exponent, compared as rank^2 <= 2^(2 exponent).
  bool admits(std::uint64_t rank) const;
  std::string exponent_string() const;
};

CensusBound census_rank_bound(const Formula& f, const Partition& phi);

// ------------------------------------------------------------ permanent

struct Cell {
  std::size_t row = 0, col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct SpecialPair {
  Cell y;  // (i_p, j_p)
  Cell z;  // (k_p, l_p)
};

struct SpecialPositionReport {
  std::size_t n = 0;
  std::vector<Cell> y_special, z_special;  // sorted by row
  std::size_t chi_y = 0, chi_z = 0;        // number of Y / Z cells
  std::size_t y_good_cols = 0, y_good_rows = 0;
  std::size_t z_good_cols = 0, z_good_rows = 0;
  std::vector<bool> one_good_rows;  // a 1 outside every special column
  std::vector<SpecialPair> pairs;   // positional pairing, gamma = pairs.size()

  std::size_t gamma_y() const { return y_special.size(); }
  std::size_t gamma_z() const { return z_special.size(); }
  std::size_t gamma() const { return pairs.size(); }
  // Columns of the paired special cells.
  std::vector<bool> pair_columns() const;
  // All paired rows are 1-good.
  bool pair_rows_one_good() const;
};

SpecialPositionReport special_positions(const PartitionMatrix& x);

// Perfect matching in the bipartite graph of nonzero cells (row-major n x n).
bool perm_nonzero(const std::vector<std::uint8_t>& pattern, std::size_t n);

// The block of pair p: [[X(i,j), X(i,l)], [X(k,j), X(k,l)]].
bool block_full_rank(const PartitionMatrix& x, const SpecialPair& p);
// Ones-pattern of the matrix with the rows and columns of all pairs removed
// has a nonzero permanent.
bool remainder_perm_nonzero(const PartitionMatrix& x, const SpecialPositionReport& r);

// For each pair whose block has rank 1, set each 0 cross cell to 1 and clear
// the first 1 (from the left, outside the pair columns) in that cell's row.
// Throws NoEligibleOneError if the row has no such 1.
PartitionMatrix swap_to_full_rank(const PartitionMatrix& x, const SpecialPositionReport& r);

// Exhaustive checks over n x n matrices whose only Y/Z cells are `pairs`
// Y-special and `pairs` Z-special cells (every layout), with every 0/1 filling
// of the other cells that has at most max_zeros zeros.
struct DichotomyScan {
  std::size_t instances = 0;  // matrices enumerated
  std::size_t checked = 0;    // all blocks rank 2, pair rows 1-good, remainder permanent nonzero
  std::size_t violations = 0; // rank below 2^gamma among the checked
  std::optional<PartitionMatrix> example;
};
DichotomyScan scan_rank_dichotomy(std::size_t n, std::size_t pairs, std::size_t max_zeros);

struct SwapScan {
  std::size_t instances = 0;  // matrices enumerated
  std::size_t mapped = 0;     // inputs with a rank-1 block, pair rows 1-good, remainder permanent nonzero
  std::size_t collisions = 0; // inputs whose image was already produced by another input
  std::size_t not_full_rank = 0;  // images with a block still of rank 1
  std::optional<std::pair<PartitionMatrix, PartitionMatrix>> example;  // two inputs with one image
};
SwapScan scan_swap_injectivity(std::size_t n, std::size_t pairs, std::size_t max_zeros);

}  // namespace ropbench

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ropbench/field.hpp"
#include "ropbench/partition.hpp"
#include "ropbench/rank.hpp"

namespace ropbench {

// n x n matrix of partition targets: the image of the variable matrix
// (x_{i_j}) under a partition. Indices here are 0-based.
class PartitionMatrix {
 public:
  PartitionMatrix() = default;
  explicit PartitionMatrix(std::size_t n, Target fill = Target::one()) : n_(n), cells_(n * n, fill) {}

  // Reads x{i}_{j} for 1 <= i, j <= n from the partition.
  static PartitionMatrix from_partition(const Partition& phi, std::size_t n);
  // Rows of tokens "y" "z" "0" "1" (or "y3", "z2"); unnumbered y/z cells are
  // numbered in row-major order. Throws InvalidParamsError.
  static PartitionMatrix parse(const std::vector<std::string>& rows);

  std::size_t n() const { return n_; }
  const Target& at(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, Target t) { cells_[i * n_ + j] = t; }
  const std::vector<Target>& cells() const { return cells_; }

  // Renumbers Y and Z cells 1, 2, ... in row-major order.
  void renumber();
  // 1 where the cell is the constant 1.
  std::vector<std::uint8_t> ones_pattern() const;
  std::string to_string() const;

  friend bool operator==(const PartitionMatrix&, const PartitionMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Target> cells_;
};

// Ryser's formula with Gray-code subset order. Exact for integer matrices
// whose permanent and partial products fit in 64 bits (all 0/1 matrices up to
// n = 20). `a` is row-major n x n.
std::int64_t ryser_permanent(std::span<const std::int64_t> a, std::size_t n);
FieldElem ryser_permanent(const PrimeField& f, std::span<const FieldElem> a, std::size_t n);
// Sum over all n! permutations; for cross-checking only.
std::int64_t naive_permanent(std::span<const std::int64_t> a, std::size_t n);

// Partial derivative matrix of perm_n under the partition matrix. Entry
// [p, q] counts the permutations that pass through exactly the Y cells of p
// and the Z cells of q and otherwise only through 1 cells: the permanent of
// the 0/1 minor left after deleting the rows and columns of p and q, or 0 if
// two chosen cells share a row or column. Rosters are the Y and Z cells'
// target variables. Requires n <= 10.
RankMatrix pd_matrix_of_perm(const PartitionMatrix& x, const PrimeField& f = {}, const MatrixCaps& caps = {});

}  // namespace ropbench

#pragma once

#include <cstdint>

#include "ropbench/formula.hpp"
#include "ropbench/permanent.hpp"
#include "ropbench/poly.hpp"

namespace ropbench {

enum class HardPolyKind { PLin, G, Permanent };

struct HardPolySpec {
  HardPolyKind kind = HardPolyKind::PLin;
  std::size_t N = 0;       // PLin: variable count
  std::size_t mprime = 0;  // PLin: number of linear forms
  std::size_t n = 0;       // G: 2n variables; Permanent: n x n
  std::uint64_t w_seed = 0;
};

// Product of m' linear forms (x_s + ... + x_e + 1) over consecutive blocks of
// N/m' variables. Throws DivisibilityError unless m' divides N with width >= 2.
Formula gen_plin(std::size_t N, std::size_t mprime, PrimeField field = {});
// Same shape with an explicit block width, over x1..x_{mprime*width}; the
// universe is x1..xN so the remaining variables are simply absent.
Formula gen_plin_width(std::size_t N, std::size_t mprime, std::size_t width, PrimeField field = {});

inline constexpr std::size_t kDefaultGMax = 7;

// The interval-recursive polynomial on x1..x2n:
//   g[i,j] = 1 for the empty interval, else
//   g[i,j] = (1 + x_i x_j) g[i+1,j-1] + sum_k w(i,k,j) g[i,k] g[k+1,j]
// over k in [i+1, j-2] with [i,k] of even length. Each w(i,k,j) is replaced by
// a random nonzero field element derived from (w_seed, i, k, j).
// Throws SizeError for n > max_n.
SparsePoly gen_g(std::size_t n, std::uint64_t w_seed, PrimeField field = {}, std::size_t max_n = kDefaultGMax);
// The value used for w(i,k,j).
FieldElem g_weight(const PrimeField& field, std::uint64_t w_seed, std::size_t i, std::size_t k, std::size_t j);

class PermanentHandle {
 public:
  explicit PermanentHandle(std::size_t n);
  std::size_t n() const { return n_; }
  // Full expansion over x{i}_{j}; n <= 6, else SizeError.
  SparsePoly expand(PrimeField field = {}) const;
  // n <= 10, else SizeError.
  PartitionMatrix partition_matrix(const Partition& phi) const;
  RankMatrix pd_matrix(const Partition& phi, PrimeField field = {}, const MatrixCaps& caps = {}) const;

 private:
  std::size_t n_;
};

PermanentHandle gen_perm(std::size_t n);

}  // namespace ropbench

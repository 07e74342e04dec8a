#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ropbench/formula.hpp"
#include "ropbench/rng.hpp"
#include "ropbench/var.hpp"

namespace ropbench {

enum class TargetKind : std::uint8_t { Y, Z, Zero, One };

struct Target {
  TargetKind kind = TargetKind::Zero;
  std::uint32_t index = 0;  // 1-based, Y/Z only

  static constexpr Target y(std::uint32_t k) { return {TargetKind::Y, k}; }
  static constexpr Target z(std::uint32_t k) { return {TargetKind::Z, k}; }
  static constexpr Target zero() { return {TargetKind::Zero, 0}; }
  static constexpr Target one() { return {TargetKind::One, 0}; }

  bool is_variable() const { return kind == TargetKind::Y || kind == TargetKind::Z; }
  // The Y/Z variable this target names; only valid when is_variable().
  Var as_var() const { return kind == TargetKind::Y ? Var::y(index) : Var::z(index); }

  friend constexpr bool operator==(const Target&, const Target&) = default;
};

std::string to_string(const Target& t);
Target parse_target(std::string_view text);

enum class Distribution : std::uint8_t { DPrime, D, Explicit };
const char* to_string(Distribution d);
Distribution parse_distribution(std::string_view text);

// Four-way distribution: Y w.p. m/N, Z w.p. m/N, 1 w.p. kappa*n/N, else 0.
struct DParams {
  std::uint64_t N = 0;
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t kappa = 0;

  // Throws InvalidParamsError unless N > 0 and 2m + kappa*n <= N.
  void validate() const;
  double prob_y() const { return static_cast<double>(m) / static_cast<double>(N); }
  double prob_one() const { return static_cast<double>(kappa * n) / static_cast<double>(N); }
  double prob_zero() const { return 1.0 - 2 * prob_y() - prob_one(); }

  // m = round(N^(1/3)), n = round(sqrt N), kappa = ceil(20 log2 n). Throws
  // InvalidParamsError when the result is not a valid distribution or the
  // regime 2m < kappa*n fails. Every N below roughly 2^25 is refused.
  static DParams asymptotic_defaults(std::uint64_t N);

  friend bool operator==(const DParams&, const DParams&) = default;
};

// Total map from a variable universe to targets, injective on Y/Z targets.
class Partition {
 public:
  Partition() = default;
  // `universe` and `targets` are parallel. Throws DuplicateVariableError on a
  // repeated variable and InvalidParamsError on a repeated Y/Z target.
  Partition(std::vector<Var> universe, std::vector<Target> targets, Distribution dist, std::uint64_t seed);

  const std::vector<Var>& universe() const { return universe_; }
  const std::vector<Target>& targets() const { return targets_; }
  Distribution distribution() const { return dist_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return universe_.size(); }

  // Throws UnassignedVariableError.
  const Target& at(const Var& v) const;
  const Target* find(const Var& v) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.universe_ == b.universe_ && a.targets_ == b.targets_ && a.dist_ == b.dist_ && a.seed_ == b.seed_;
  }

 private:
  std::vector<Var> universe_;
  std::vector<Target> targets_;
  std::unordered_map<Var, std::size_t> index_;
  Distribution dist_ = Distribution::Explicit;
  std::uint64_t seed_ = 0;
};

// Y/Z targets are numbered 1, 2, ... in universe order on each side.
Partition sample_d_prime(std::span<const Var> universe, std::uint64_t seed);
Partition sample_d(const DParams& params, std::span<const Var> universe, std::uint64_t seed);
// Variants drawing from an existing stream; the recorded seed is rng.key().
Partition sample_d_prime(std::span<const Var> universe, CounterRng& rng);
Partition sample_d(const DParams& params, std::span<const Var> universe, CounterRng& rng);

// Leaves become y_k / z_k / 0 / 1; structure is unchanged.
Formula apply_partition(const Formula& f, const Partition& phi);

struct PartitionStats {
  std::size_t count_y = 0;
  std::size_t count_z = 0;
  std::size_t count_one = 0;
  std::size_t count_zero = 0;
  std::size_t imbalance = 0;  // |count_y - count_z|

  friend bool operator==(const PartitionStats&, const PartitionStats&) = default;
};
PartitionStats partition_stats(const Partition& phi);

// {"seed":..., "dist":"D"|"DPrime"|"Explicit", "map":{"x1":"y1", ...}}
std::string partition_to_json(const Partition& phi);
Partition partition_from_json(std::string_view text);

std::vector<Var> x_vars(std::size_t n);
std::vector<Var> grid_vars(std::size_t n);

}  // namespace ropbench

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace ropbench {

// Counter-based generator: the i-th output is a pure function of (key, i),
// using the SplitMix64 finalizer as the mixing function. Streams for parallel
// trials are derived from (master seed, trial index) via stream().
//
// All sampling helpers are defined here rather than through <random>
// distributions so that outputs are bit-identical across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  static CounterRng stream(std::uint64_t master_seed, std::uint64_t stream_index);
  // Seed value reported for the stream derived from (master, index).
  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }

  // Output at an arbitrary counter position, without advancing.
  result_type at(std::uint64_t counter) const;

  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform01();
  bool coin() { return ((*this)() >> 63) != 0; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace ropbench

#include "ropbench/rng.hpp"

namespace ropbench {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ull;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::derive_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return mix64(mix64(master_seed) ^ mix64(stream_index * kStreamSalt + kGamma));
}

CounterRng CounterRng::stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return CounterRng(derive_seed(master_seed, stream_index));
}

CounterRng::result_type CounterRng::at(std::uint64_t counter) const {
  return mix64(key_ + (counter + 1) * kGamma);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire's multiply-and-reject.
  std::uint64_t x = (*this)();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace ropbench

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ctxclass {

// Reproducible random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every derived draw (bounded integers,
// doubles, normals, shuffles) is implemented here instead of going through
// the implementation-defined std distributions, so a seed means the same
// thing on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call, the pair's second half is cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates, walking from the back.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ctxclass

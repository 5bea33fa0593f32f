#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace fracsym {

/// Counter-based generator (splitmix64): output k of stream `seed` depends
/// only on (seed, k), so randomized suites replay bit-identically across
/// platforms and thread schedules.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(
                                                  hi - lo + 1));
  }

  /// Heavy-tailed positive variate (Pareto-like, tail index ~1.5).
  double heavy_tail() {
    const double u = uniform();
    return std::min(1e6, 1.0 / std::pow(1.0 - u, 2.0 / 3.0) - 1.0);
  }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace fracsym

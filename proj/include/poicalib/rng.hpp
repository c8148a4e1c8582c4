#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace poicalib {

/// Seeded generator whose every derived draw is defined here rather than by
/// the standard library distributions, so streams are identical across
/// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller; the second variate is cached.
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Forward Fisher-Yates: position i is swapped with i + below(n - i).
/// Stopping after k steps leaves the same prefix a full shuffle would.
template <class T>
void shuffle_prefix(std::vector<T>& values, std::size_t k, Rng& rng) {
  const std::size_t n = values.size();
  if (k > n) k = n;
  for (std::size_t i = 0; i + 1 < n && i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    using std::swap;
    swap(values[i], values[j]);
  }
}

template <class T>
void shuffle(std::vector<T>& values, Rng& rng) {
  shuffle_prefix(values, values.size(), rng);
}

}  // namespace poicalib

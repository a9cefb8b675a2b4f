#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ldt {

// Mixes a seed with a stream tag so that independent consumers (transform draws,
// sampling, instance generation) never share a sequence.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// mt19937_64 with its own bounded draws: the standard distributions are
// implementation-defined, and runs must be byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return v % bound;
  }

  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Bernoulli with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  // First `count` entries of `items` become a uniform sample without replacement.
  template <class T>
  void partial_shuffle(std::vector<T>& items, std::size_t count) {
    for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ldt

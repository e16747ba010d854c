#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace lif {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a path of indices:
///   h = splitmix64(master); for each k: h = splitmix64(h ^ splitmix64(k))
/// Streams keyed by (master, i) or (master, i, a) are therefore independent of
/// the order in which workers visit them.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : path) h = splitmix64(h ^ splitmix64(k));
  return h;
}

/// Seedable generator with a fully specified stream.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard).
/// uniform(): top 53 bits of one engine word scaled by 2^-53, in [0, 1).
/// normal(): Box-Muller on two uniforms, u1 = 1 - uniform() in (0, 1],
///   z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2);
///   z0 is returned first, z1 on the following call.
/// index(n): rejection sampling on engine words, unbiased in [0, n).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] std::uint64_t next() { return engine_(); }
  [[nodiscard]] double uniform();
  [[nodiscard]] double normal();
  [[nodiscard]] double normal(double mean, double stddev) { return mean + stddev * normal(); }
  [[nodiscard]] std::size_t index(std::size_t n);

  /// Fisher-Yates shuffle driven by index(); identical across standard libraries.
  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace lif

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lif/matrix.hpp"

namespace lif {

/// Analytic stand-in for a generator + face embedder with one known identity axis.
struct ToyConfig {
  std::size_t d = 16;   ///< latent dimension; the embedding has the same size
  double alpha = 5.0;   ///< gain on the identity coordinate
  double beta = 0.2;    ///< gain on the residual coordinates
  std::uint64_t seed = 0;

  void validate() const;
};

/// embedding(w) = normalize(alpha (w.u) e_1 + beta sum_k (q_k.w) e_{k+1})
///
/// u is a seeded random unit vector and q_1..q_{d-1} a seeded orthonormal basis
/// of its complement, so the residual w - (w.u)u is rotated into coordinates
/// 2..d. Both are drawn from Rng(derive_seed(seed, {0})).
class ToyWorld {
 public:
  explicit ToyWorld(const ToyConfig& cfg);

  [[nodiscard]] const ToyConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::span<const double> identity_direction() const noexcept { return u_; }

  /// Throws ValidationError when the embedding would be the zero vector.
  [[nodiscard]] std::vector<double> map(std::span<const double> w) const;
  [[nodiscard]] std::vector<double> map(std::span<const float> w) const;

  /// Maps every row.
  [[nodiscard]] RealMatrix embed(const RealMatrix& latents, std::size_t jobs = 1) const;

 private:
  ToyConfig cfg_;
  std::vector<double> u_;
  std::vector<std::vector<double>> complement_;
};

/// m rows of i.i.d. standard normals from Rng(derive_seed(seed, {1})), row-major
/// draw order. The toy mapping network is the identity, so these serve as W.
[[nodiscard]] RealMatrix toy_latents(std::size_t m, std::size_t d, std::uint64_t seed);

}  // namespace lif

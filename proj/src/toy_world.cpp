#include "lif/toy_world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lif/error.hpp"
#include "lif/parallel.hpp"
#include "lif/rng.hpp"

namespace lif {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Projects out every vector in `basis` (twice, for numerical safety) and normalizes.
bool orthonormalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double c = dot(v, b);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * b[k];
    }
  }
  const double n = std::sqrt(dot(v, v));
  if (n < 1e-8) return false;
  for (auto& x : v) x /= n;
  return true;
}

}  // namespace

void ToyConfig::validate() const {
  if (d < 2) throw ValidationError("toy: d must be >= 2");
  if (!(alpha > 0.0)) throw ValidationError("toy: alpha must be positive");
  if (!(beta >= 0.0)) throw ValidationError("toy: beta must be non-negative");
}

ToyWorld::ToyWorld(const ToyConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(derive_seed(cfg_.seed, {0}));
  auto draw = [&] {
    std::vector<double> v(cfg_.d);
    for (auto& x : v) x = rng.normal();
    return v;
  };

  std::vector<std::vector<double>> basis;
  while (basis.size() < cfg_.d) {
    auto v = draw();
    if (orthonormalize(v, basis)) basis.push_back(std::move(v));
  }
  u_ = std::move(basis.front());
  complement_.assign(std::make_move_iterator(basis.begin() + 1), std::make_move_iterator(basis.end()));
}

std::vector<double> ToyWorld::map(std::span<const double> w) const {
  if (w.size() != cfg_.d) throw ValidationError("toy: expected d=" + std::to_string(cfg_.d) + ", got " + std::to_string(w.size()));
  std::vector<double> e(cfg_.d);
  // q_k is orthogonal to u, so q_k.w equals q_k.(w - (w.u)u).
  e[0] = cfg_.alpha * dot(w, u_);
  for (std::size_t k = 0; k < complement_.size(); ++k) e[k + 1] = cfg_.beta * dot(w, complement_[k]);
  const double n = std::sqrt(dot(e, e));
  const double scale = std::max(cfg_.alpha, cfg_.beta) * std::sqrt(dot(w, w));
  if (!(n > 1e-12 * scale)) throw ValidationError("toy: zero embedding");
  for (auto& x : e) x /= n;
  return e;
}

std::vector<double> ToyWorld::map(std::span<const float> w) const {
  const std::vector<double> wd(w.begin(), w.end());
  return map(std::span<const double>(wd));
}

RealMatrix ToyWorld::embed(const RealMatrix& latents, std::size_t jobs) const {
  RealMatrix out(latents.rows(), cfg_.d);
  parallel_for(latents.rows(), jobs, [&](std::size_t i) { out.set_row(i, map(latents.row(i))); });
  return out;
}

RealMatrix toy_latents(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m < 3) throw ValidationError("toy_latents: m must be >= 3");
  if (d < 1) throw ValidationError("toy_latents: d must be >= 1");
  Rng rng(derive_seed(seed, {1}));
  RealMatrix out(m, d);
  for (auto& x : out.data()) x = static_cast<float>(rng.normal());
  return out;
}

}  // namespace lif

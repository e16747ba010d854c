#include "lif/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "lif/error.hpp"
#include "lif/parallel.hpp"
#include "lif/rng.hpp"

namespace lif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot_row(std::span<const double> w, std::span<const float> x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * static_cast<double>(x[k]);
  return s;
}

// Decision value including the bias slot when present.
double decision(std::span<const double> w, std::span<const float> x, bool bias) {
  double s = dot_row(w, x);
  if (bias) s += w[x.size()];
  return s;
}

}  // namespace

void SvmConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("svm: C must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("svm: tolerance must be positive");
  if (max_epochs < 1) throw ValidationError("svm: max epochs must be >= 1");
}

SvmSolution train_linear_svm(const RealMatrix& x, std::span<const std::uint8_t> labels, const SvmConfig& cfg) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_linear_svm(x, rows, labels, cfg);
}

SvmSolution train_linear_svm(const RealMatrix& x, std::span<const std::size_t> rows,
                             std::span<const std::uint8_t> labels, const SvmConfig& cfg) {
  cfg.validate();
  const std::size_t n = rows.size();
  if (labels.size() != n) throw ValidationError("svm: labels and rows differ in length");
  if (n == 0) throw ValidationError("svm: no training rows");

  std::vector<double> y(n);
  std::size_t positives = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] > 1) throw ValidationError("svm: labels must be 0 or 1");
    y[k] = labels[k] ? 1.0 : -1.0;
    positives += labels[k];
  }
  if (positives == 0 || positives == n) throw ValidationError("degenerate labels");

  const std::size_t d = x.cols();
  const bool bias = cfg.include_bias;
  const double c = cfg.c;
  std::vector<double> w(d + (bias ? 1 : 0), 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sq = 0.0;
    for (float v : x.row(rows[k])) sq += static_cast<double>(v) * static_cast<double>(v);
    qd[k] = sq + (bias ? 1.0 : 0.0);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t active = n;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;
  Rng rng(cfg.seed);

  SvmStats stats;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(active));
    double pg_max_new = -kInf;
    double pg_min_new = kInf;

    for (std::size_t s = 0; s < active;) {
      const std::size_t k = order[s];
      const auto xr = x.row(rows[k]);
      const double g = y[k] * decision(w, xr, bias) - 1.0;

      double pg = 0.0;
      if (alpha[k] == 0.0) {
        if (cfg.shrinking && g > pg_max_old) {
          std::swap(order[s], order[--active]);
          continue;
        }
        pg = std::min(g, 0.0);
      } else if (alpha[k] == c) {
        if (cfg.shrinking && g < pg_min_old) {
          std::swap(order[s], order[--active]);
          continue;
        }
        pg = std::max(g, 0.0);
      } else {
        pg = g;
      }
      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::abs(pg) > 1e-12) {
        const double old = alpha[k];
        if (qd[k] > 0.0) {
          alpha[k] = std::clamp(old - g / qd[k], 0.0, c);
        } else {
          alpha[k] = g < 0.0 ? c : 0.0;
        }
        const double step = (alpha[k] - old) * y[k];
        if (step != 0.0) {
          for (std::size_t j = 0; j < d; ++j) w[j] += step * static_cast<double>(xr[j]);
          if (bias) w[d] += step;
        }
      }
      ++s;
    }
    stats.epochs = epoch + 1;

    const double violation = active == 0 ? 0.0 : std::max(pg_max_new, -pg_min_new);
    if (violation < cfg.tolerance) {
      if (active == n) {
        stats.converged = true;
        break;
      }
      // Shrunk set converged; re-check everything before stopping.
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? kInf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -kInf : pg_min_new;
  }

  // Final statistics over the full problem.
  double wnorm2 = 0.0;
  for (double v : w) wnorm2 += v * v;
  double hinge = 0.0;
  double alpha_sum = 0.0;
  double max_violation = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double g = y[k] * decision(w, x.row(rows[k]), bias) - 1.0;
    hinge += std::max(0.0, -g);
    alpha_sum += alpha[k];
    double pg = g;
    if (alpha[k] == 0.0) pg = std::min(g, 0.0);
    else if (alpha[k] == c) pg = std::max(g, 0.0);
    max_violation = std::max(max_violation, std::abs(pg));
    if (alpha[k] > 0.0) ++stats.support_vectors;
  }
  stats.primal_objective = 0.5 * wnorm2 + c * hinge;
  stats.dual_objective = alpha_sum - 0.5 * wnorm2;
  stats.max_violation = max_violation;

  SvmSolution out;
  out.bias = bias ? w[d] : 0.0;
  w.resize(d);
  out.weights = std::move(w);
  out.alpha = std::move(alpha);
  out.stats = stats;
  return out;
}

double svm_primal_objective(const RealMatrix& x, std::span<const std::uint8_t> labels, std::span<const double> weights,
                            double bias, double c, bool include_bias) {
  double reg = 0.0;
  for (double v : weights) reg += v * v;
  if (include_bias) reg += bias * bias;
  double hinge = 0.0;
  for (std::size_t k = 0; k < x.rows(); ++k) {
    const double y = labels[k] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (dot_row(weights, x.row(k)) + bias));
  }
  return 0.5 * reg + c * hinge;
}

IdentityBoundary boundary_from_svm(std::size_t reference, std::span<const double> weights, double bias) {
  double n2 = 0.0;
  for (double v : weights) n2 += v * v;
  const double norm = std::sqrt(n2);
  if (!(norm > 0.0)) throw ValidationError("no direction");
  IdentityBoundary b;
  b.reference = reference;
  b.normal.reserve(weights.size());
  for (double v : weights) b.normal.push_back(v / norm);
  b.intercept = bias / norm;
  return b;
}

BoundarySet train_all_boundaries(const RealMatrix& latents, const std::vector<LabelRow>& labels, const SvmConfig& cfg,
                                 std::size_t jobs) {
  cfg.validate();
  const std::size_t m = latents.rows();
  if (labels.size() != m) throw ValidationError("labels do not align with latents: " + std::to_string(labels.size()) +
                                                " rows vs " + std::to_string(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (labels[i].labels.size() + 1 != m) throw ValidationError("label row " + std::to_string(i) + " has wrong length");
  }

  std::vector<std::optional<IdentityBoundary>> trained(m);
  std::vector<std::string> errors(m);
  parallel_for(m, jobs, [&](std::size_t i) {
    std::vector<std::size_t> rows;
    rows.reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) rows.push_back(j);
    }
    SvmConfig local = cfg;
    local.seed = derive_seed(cfg.seed, {i});
    try {
      const auto sol = train_linear_svm(latents, rows, labels[i].labels, local);
      auto b = boundary_from_svm(i, sol.weights, sol.bias);
      b.stats = sol.stats;
      trained[i] = std::move(b);
    } catch (const ValidationError& e) {
      errors[i] = e.what();
    }
  });

  BoundarySet set;
  set.references = m;
  set.dimension = latents.cols();
  for (std::size_t i = 0; i < m; ++i) {
    if (trained[i]) set.boundaries.push_back(std::move(*trained[i]));
    else set.failures.push_back({i, errors[i]});
  }
  if (set.boundaries.empty()) {
    throw ValidationError(set.failures.front().reason + ": all " + std::to_string(m) + " references failed");
  }
  return set;
}

RealMatrix boundaries_to_matrix(const BoundarySet& set) {
  RealMatrix out(set.references, set.dimension + 1);
  for (const auto& b : set.boundaries) {
    auto row = out.row(b.reference);
    for (std::size_t k = 0; k < set.dimension; ++k) row[k] = static_cast<float>(b.normal[k]);
    row[set.dimension] = static_cast<float>(b.intercept);
  }
  return out;
}

BoundarySet boundaries_from_matrix(const RealMatrix& mat) {
  if (mat.cols() < 2) throw ValidationError("boundaries matrix needs at least 2 columns");
  BoundarySet set;
  set.references = mat.rows();
  set.dimension = mat.cols() - 1;
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    const auto row = mat.row(i);
    std::vector<double> normal(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(set.dimension));
    try {
      // Stored normals are unit length up to float rounding; renormalize.
      auto b = boundary_from_svm(i, normal, 0.0);
      b.intercept = row[set.dimension];
      set.boundaries.push_back(std::move(b));
    } catch (const ValidationError&) {
      set.failures.push_back({i, "no direction"});
    }
  }
  return set;
}

nlohmann::json boundary_stats_json(const BoundarySet& set) {
  nlohmann::json j;
  j["references"] = set.references;
  j["dimension"] = set.dimension;
  auto& rows = j["boundaries"] = nlohmann::json::array();
  std::size_t converged = 0;
  for (const auto& b : set.boundaries) {
    converged += b.stats.converged ? 1 : 0;
    rows.push_back({{"ref", b.reference},
                    {"epochs", b.stats.epochs},
                    {"primal", b.stats.primal_objective},
                    {"dual", b.stats.dual_objective},
                    {"gap", b.stats.duality_gap()},
                    {"max_violation", b.stats.max_violation},
                    {"support_vectors", b.stats.support_vectors},
                    {"converged", b.stats.converged}});
  }
  auto& fails = j["failures"] = nlohmann::json::array();
  for (const auto& f : set.failures) fails.push_back({{"ref", f.reference}, {"reason", f.reason}});
  j["converged"] = converged;
  return j;
}

}  // namespace lif

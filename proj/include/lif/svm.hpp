#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lif/matrix.hpp"
#include "lif/similarity.hpp"

namespace lif {

/// Soft-margin linear SVM settings. With include_bias the bias is learned as the
/// weight of an extra constant feature 1.0, so it is regularized with the rest.
struct SvmConfig {
  double c = 1.0;
  double tolerance = 1e-4;
  std::size_t max_epochs = 10000;
  bool include_bias = true;
  bool shrinking = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SvmStats {
  std::size_t epochs = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double max_violation = 0.0;  ///< largest projected-gradient magnitude at exit
  std::size_t support_vectors = 0;
  bool converged = false;

  [[nodiscard]] double duality_gap() const noexcept { return primal_objective - dual_objective; }
};

struct SvmSolution {
  std::vector<double> weights;  ///< length d, bias component excluded
  double bias = 0.0;
  std::vector<double> alpha;    ///< dual variables, each in [0, C]
  SvmStats stats;
};

/// Dual coordinate descent on the box-constrained L1-hinge dual:
///   min_a  1/2 a'Qa - sum(a),  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
/// Labels are 0/1 and map to -1/+1. Coordinates are visited in a fresh random
/// permutation each epoch (seeded from cfg.seed); with shrinking, bounded
/// variables whose gradient points outward are set aside and re-checked before
/// declaring convergence. Stops once every projected gradient is below
/// cfg.tolerance, or after cfg.max_epochs (converged = false).
///
/// Throws ValidationError("degenerate labels") if only one class is present.
[[nodiscard]] SvmSolution train_linear_svm(const RealMatrix& x, std::span<const std::uint8_t> labels,
                                           const SvmConfig& cfg);

/// Same, training on the subset `rows` of x; labels[k] belongs to x.row(rows[k]).
[[nodiscard]] SvmSolution train_linear_svm(const RealMatrix& x, std::span<const std::size_t> rows,
                                           std::span<const std::uint8_t> labels, const SvmConfig& cfg);

/// 1/2 (|w|^2 + [bias^2]) + C sum max(0, 1 - y (w.x + bias)).
[[nodiscard]] double svm_primal_objective(const RealMatrix& x, std::span<const std::uint8_t> labels,
                                          std::span<const double> weights, double bias, double c,
                                          bool include_bias);

struct IdentityBoundary {
  std::size_t reference = 0;
  std::vector<double> normal;  ///< unit length, points toward the label-1 side
  double intercept = 0.0;      ///< bias / |weights|
  SvmStats stats;
};

/// Throws ValidationError("no direction") when the weight vector is zero.
[[nodiscard]] IdentityBoundary boundary_from_svm(std::size_t reference, std::span<const double> weights, double bias);

struct BoundaryFailure {
  std::size_t reference = 0;
  std::string reason;
};

/// One trained boundary per reference that succeeded, in reference order.
struct BoundarySet {
  std::size_t references = 0;
  std::size_t dimension = 0;
  std::vector<IdentityBoundary> boundaries;
  std::vector<BoundaryFailure> failures;
};

/// Trains boundary i on W without row i against labels[i]. Reference i uses the
/// seed derive_seed(cfg.seed, {i}), so results do not depend on `jobs`.
/// Per-reference failures are collected; throws only if every reference fails.
[[nodiscard]] BoundarySet train_all_boundaries(const RealMatrix& latents, const std::vector<LabelRow>& labels,
                                               const SvmConfig& cfg, std::size_t jobs = 1);

/// m x (d+1): row i is normal_i followed by intercept_i; failed references are all zeros.
[[nodiscard]] RealMatrix boundaries_to_matrix(const BoundarySet& set);
/// Inverse of boundaries_to_matrix. Zero rows become failures; normals are renormalized in double.
[[nodiscard]] BoundarySet boundaries_from_matrix(const RealMatrix& mat);

[[nodiscard]] nlohmann::json boundary_stats_json(const BoundarySet& set);

}  // namespace lif

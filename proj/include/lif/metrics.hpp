#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lif/matrix.hpp"

namespace lif {

/// Genuine (same identity) and impostor (different identity) comparison scores.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;

  /// Both lists nonempty and finite.
  void validate() const;
};

enum class Protocol {
  AllPairs,          ///< every unordered pair of samples once
  PerReference1toN,  ///< first sample of each identity against all other samples
};

[[nodiscard]] std::string_view to_string(Protocol p) noexcept;
/// Accepts "all-pairs" and "per-reference-1toN".
[[nodiscard]] Protocol parse_protocol(std::string_view text);

/// Cosine scores over rows of `embeddings`, grouped by `identities` (one per row).
/// Requires at least two identities with at least two samples each.
[[nodiscard]] ScoreSet build_scores(const RealMatrix& embeddings, std::span<const std::size_t> identities,
                                    Protocol protocol);

// Match conventions: an impostor matches at score >= t, a genuine pair fails
// to match at score < t.
struct ErrorRates {
  double fmr = 0.0;
  double fnmr = 0.0;
};

[[nodiscard]] ErrorRates error_rates_at(const ScoreSet& s, double threshold);

/// Candidate thresholds, ascending: every distinct score, the midpoint between
/// each pair of neighbouring distinct scores, and one value just above the
/// largest score (where FMR is 0).
[[nodiscard]] std::vector<double> sweep_thresholds(const ScoreSet& s);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Over the sweep, picks the smallest threshold minimizing |FMR - FNMR| and
/// reports (FMR + FNMR) / 2 there.
[[nodiscard]] EerResult eer(const ScoreSet& s);

/// Lowest FNMR over swept thresholds with FMR <= 1%.
[[nodiscard]] double fmr100(const ScoreSet& s);

/// (mu_G - mu_I)^2 / (var_G + var_I) with n-1 sample variances.
[[nodiscard]] double fdr(const ScoreSet& s);

struct VerificationReport {
  double eer = 0.0;
  double fmr100 = 0.0;
  double fdr = 0.0;
  double threshold = 0.0;  ///< threshold at the EER operating point
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] VerificationReport verify(const ScoreSet& s);

struct DetPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

[[nodiscard]] std::vector<DetPoint> det_curve(const ScoreSet& s);
void write_det_csv(const std::filesystem::path& path, const std::vector<DetPoint>& curve);

/// Rows are models, columns benchmarks. Within a benchmark the best of k models
/// scores k-1 points and the worst 0; tied models share the mean of the points
/// their positions would get. Returns per-model sums.
[[nodiscard]] std::vector<double> borda_count(const RealMatrix& accuracies);

struct OneToNSummary {
  std::vector<double> scores;
  double mean = 0.0;
};

/// Cosine similarity of `reference` against each row of `samples`.
[[nodiscard]] OneToNSummary one_to_n_summary(std::span<const float> reference, const RealMatrix& samples);

}  // namespace lif

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lif/matrix.hpp"

namespace lif {

/// a.b / (|a| |b|), clamped to [-1, 1]. Throws ValidationError("degenerate embedding")
/// on a zero vector and on length mismatch.
[[nodiscard]] double cosine_similarity(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Cosine scores of one reference against every other row, in ascending j order
/// (j == reference skipped), plus the median of those scores.
struct SimilarityRow {
  std::size_t reference = 0;
  std::vector<double> scores;
  double threshold = 0.0;
};

/// label[k] == 1 iff scores[k] > threshold. Aligned with SimilarityRow::scores.
struct LabelRow {
  std::size_t reference = 0;
  std::vector<std::uint8_t> labels;

  [[nodiscard]] std::size_t positives() const noexcept;
  /// Only one class present; no boundary can be trained from this row.
  [[nodiscard]] bool degenerate() const noexcept;
};

/// Odd length: middle order statistic. Even: mean of the two middle ones.
[[nodiscard]] double median_threshold(std::span<const double> scores);

[[nodiscard]] std::vector<SimilarityRow> similarity_matrix(const RealMatrix& embeddings, std::size_t jobs = 1);

[[nodiscard]] LabelRow label_row(const SimilarityRow& sim);
[[nodiscard]] std::vector<LabelRow> label_rows(const std::vector<SimilarityRow>& sims);

/// m x (m-1) matrices of scores / 0-1 labels, and an m x 1 matrix of thresholds.
[[nodiscard]] RealMatrix scores_to_matrix(const std::vector<SimilarityRow>& sims);
[[nodiscard]] RealMatrix thresholds_to_matrix(const std::vector<SimilarityRow>& sims);
[[nodiscard]] RealMatrix labels_to_matrix(const std::vector<LabelRow>& labels);
/// Throws ValidationError on entries other than 0 or 1.
[[nodiscard]] std::vector<LabelRow> labels_from_matrix(const RealMatrix& mat);

/// Debug dump `i,j,score,label` where j indexes the full matrix.
void write_similarity_csv(const std::filesystem::path& path, const std::vector<SimilarityRow>& sims,
                          const std::vector<LabelRow>& labels);

}  // namespace lif

#include "lif/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "lif/error.hpp"
#include "lif/parallel.hpp"

namespace lif {

namespace {

template <class T>
double dot(std::span<const T> a, std::span<const T> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return s;
}

template <class T>
double norm(std::span<const T> a) {
  return std::sqrt(dot(a, a));
}

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

template <class T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size() || a.empty()) throw ValidationError("cosine_similarity: length mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ValidationError("degenerate embedding");
  return clamp_unit(dot(a, b) / (na * nb));
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine_similarity(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

std::size_t LabelRow::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

bool LabelRow::degenerate() const noexcept {
  const auto pos = positives();
  return pos == 0 || pos == labels.size();
}

double median_threshold(std::span<const double> scores) {
  if (scores.size() < 2) throw ValidationError("median_threshold: need at least 2 scores");
  std::vector<double> v(scores.begin(), scores.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<SimilarityRow> similarity_matrix(const RealMatrix& embeddings, std::size_t jobs) {
  const std::size_t m = embeddings.rows();
  if (m < 3) throw ValidationError("similarity_matrix: need m >= 3, got " + std::to_string(m));

  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    norms[i] = norm(embeddings.row(i));
    if (norms[i] == 0.0) throw ValidationError("degenerate embedding at row " + std::to_string(i));
  }

  // dot() is commutative term by term and sums in a fixed order, so score(i,j)
  // and score(j,i) come out bit-identical without sharing work between rows.
  std::vector<SimilarityRow> rows(m);
  parallel_for(m, jobs, [&](std::size_t i) {
    SimilarityRow& row = rows[i];
    row.reference = i;
    row.scores.reserve(m - 1);
    const auto a = embeddings.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      row.scores.push_back(clamp_unit(dot(a, embeddings.row(j)) / (norms[i] * norms[j])));
    }
    row.threshold = median_threshold(row.scores);
  });
  return rows;
}

LabelRow label_row(const SimilarityRow& sim) {
  LabelRow out;
  out.reference = sim.reference;
  out.labels.reserve(sim.scores.size());
  for (double s : sim.scores) out.labels.push_back(s > sim.threshold ? 1 : 0);
  return out;
}

std::vector<LabelRow> label_rows(const std::vector<SimilarityRow>& sims) {
  std::vector<LabelRow> out;
  out.reserve(sims.size());
  for (const auto& s : sims) out.push_back(label_row(s));
  return out;
}

RealMatrix scores_to_matrix(const std::vector<SimilarityRow>& sims) {
  if (sims.empty()) throw ValidationError("no similarity rows");
  RealMatrix out(sims.size(), sims.front().scores.size());
  for (std::size_t i = 0; i < sims.size(); ++i) out.set_row(i, sims[i].scores);
  return out;
}

RealMatrix thresholds_to_matrix(const std::vector<SimilarityRow>& sims) {
  RealMatrix out(sims.size(), 1);
  for (std::size_t i = 0; i < sims.size(); ++i) out(i, 0) = static_cast<float>(sims[i].threshold);
  return out;
}

RealMatrix labels_to_matrix(const std::vector<LabelRow>& labels) {
  if (labels.empty()) throw ValidationError("no label rows");
  RealMatrix out(labels.size(), labels.front().labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto row = out.row(i);
    std::transform(labels[i].labels.begin(), labels[i].labels.end(), row.begin(),
                   [](std::uint8_t v) { return static_cast<float>(v); });
  }
  return out;
}

std::vector<LabelRow> labels_from_matrix(const RealMatrix& mat) {
  if (mat.cols() + 1 != mat.rows()) {
    throw ValidationError("labels matrix must be m x (m-1), got " + std::to_string(mat.rows()) + "x" +
                          std::to_string(mat.cols()));
  }
  std::vector<LabelRow> out(mat.rows());
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    out[i].reference = i;
    out[i].labels.reserve(mat.cols());
    for (float v : mat.row(i)) {
      if (v != 0.0f && v != 1.0f) throw ValidationError("labels matrix holds a value other than 0/1 in row " + std::to_string(i));
      out[i].labels.push_back(v == 1.0f ? 1 : 0);
    }
  }
  return out;
}

void write_similarity_csv(const std::filesystem::path& path, const std::vector<SimilarityRow>& sims,
                          const std::vector<LabelRow>& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(17);
  out << "i,j,score,label\n";
  for (std::size_t r = 0; r < sims.size(); ++r) {
    const std::size_t i = sims[r].reference;
    for (std::size_t k = 0; k < sims[r].scores.size(); ++k) {
      const std::size_t j = k < i ? k : k + 1;
      out << i << ',' << j << ',' << sims[r].scores[k] << ',' << int(labels[r].labels[k]) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lif

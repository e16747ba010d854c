#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lif/error.hpp"
#include "lif/similarity.hpp"
#include "oracles.hpp"

using namespace lif;
using doctest::Approx;

TEST_CASE("cosine_similarity examples") {
  const std::vector<double> e1{1, 0}, e2{0, 1};
  CHECK(cosine_similarity(std::span<const double>(e1), std::span<const double>(e1)) == 1.0);
  CHECK(cosine_similarity(std::span<const double>(e1), std::span<const double>(e2)) == 0.0);
  const std::vector<double> a{1, 2, 3}, b{-1, 0, 2};
  CHECK(cosine_similarity(std::span<const double>(a), std::span<const double>(b)) ==
        Approx(5.0 / (std::sqrt(14.0) * std::sqrt(5.0))).epsilon(1e-15));
  CHECK(cosine_similarity(std::span<const double>(a), std::span<const double>(b)) == Approx(0.5976).epsilon(1e-4));

  const std::vector<double> zero{0, 0};
  CHECK_THROWS_WITH_AS(cosine_similarity(std::span<const double>(zero), std::span<const double>(e1)),
                       "degenerate embedding", ValidationError);
}

TEST_CASE("cosine stays within [-1, 1] for nearly parallel vectors") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(7);
    for (auto& x : a) x = nd(gen);
    std::vector<double> b = a;
    for (auto& x : b) x *= 3.0000000001;
    const double c = cosine_similarity(std::span<const double>(a), std::span<const double>(b));
    CHECK(c <= 1.0);
    CHECK(c >= -1.0);
  }
}

TEST_CASE("median_threshold examples") {
  CHECK(median_threshold(std::vector<double>{0.1, 0.9, 0.5}) == 0.5);
  CHECK(median_threshold(std::vector<double>{0.2, 0.4}) == Approx(0.3));
  CHECK_THROWS_AS(median_threshold(std::vector<double>{0.2}), ValidationError);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ud(-1, 1);
  std::vector<double> v(999);
  for (auto& x : v) x = ud(gen);
  CHECK(median_threshold(v) == oracle::median_by_sort(v));
  v.pop_back();
  CHECK(median_threshold(v) == oracle::median_by_sort(v));
}

TEST_CASE("similarity_matrix special cases") {
  SUBCASE("identical rows") {
    const RealMatrix f(3, 2, {0.6f, 0.8f, 0.6f, 0.8f, 0.6f, 0.8f});
    for (const auto& row : similarity_matrix(f)) {
      for (double s : row.scores) CHECK(s == Approx(1.0));
      CHECK(row.threshold == Approx(1.0));
    }
  }
  SUBCASE("mutually orthogonal rows") {
    const RealMatrix f(3, 3, {1, 0, 0, 0, 2, 0, 0, 0, 3});
    for (const auto& row : similarity_matrix(f)) {
      for (double s : row.scores) CHECK(s == 0.0);
    }
  }
  SUBCASE("m < 3 rejected, zero row reported with its index") {
    CHECK_THROWS_AS(similarity_matrix(RealMatrix(2, 2, {1, 0, 0, 1})), ValidationError);
    CHECK_THROWS_WITH(similarity_matrix(RealMatrix(3, 2, {1, 0, 0, 0, 0, 1})), doctest::Contains("row 1"));
  }
}

TEST_CASE("seeded 10x8 similarity matrix matches the double-loop oracle") {
  const auto f = oracle::random_matrix(10, 8, 2024);
  const auto sims = similarity_matrix(f, 3);
  REQUIRE(sims.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    REQUIRE(sims[i].scores.size() == 9);
    std::size_t k = 0;
    for (std::size_t j = 0; j < 10; ++j) {
      if (j == i) continue;
      CHECK(std::abs(sims[i].scores[k] - oracle::cosine(f, i, j)) <= 1e-12);
      // symmetric pair agrees exactly
      const std::size_t kk = i < j ? i : i - 1;
      CHECK(sims[j].scores[kk] == sims[i].scores[k]);
      ++k;
    }
    CHECK(sims[i].threshold == oracle::median_by_sort(sims[i].scores));
  }
}

TEST_CASE("label_row examples") {
  SimilarityRow s{0, {0.1, 0.5, 0.9}, 0.5};
  CHECK(label_row(s).labels == std::vector<std::uint8_t>{0, 0, 1});

  SimilarityRow flat{3, {0.4, 0.4, 0.4, 0.4}, 0.4};
  const auto l = label_row(flat);
  CHECK(l.labels == std::vector<std::uint8_t>(4, 0));
  CHECK(l.degenerate());
  CHECK(l.reference == 3);
}

TEST_CASE("random 100-score row: both classes present and balanced") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ud(-1, 1);
  SimilarityRow s;
  s.scores.resize(100);
  for (auto& x : s.scores) x = ud(gen);
  s.threshold = median_threshold(s.scores);
  const auto l = label_row(s);
  std::size_t ones = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    const std::uint8_t expected = s.scores[k] > s.threshold ? 1 : 0;  // oracle labelling
    CHECK(l.labels[k] == expected);
    ones += expected;
  }
  const std::size_t zeros = 100 - ones;
  CHECK(ones > 0);
  CHECK(zeros > 0);
  CHECK((ones > zeros ? ones - zeros : zeros - ones) <= 2);
}

TEST_CASE("property: distinct scores give ceil((m-1)/2) zeros") {
  for (std::size_t m : {3u, 4u, 10u, 11u, 57u}) {
    const auto f = oracle::random_matrix(m, 6, 100 + m);
    for (const auto& l : label_rows(similarity_matrix(f))) {
      CHECK(l.labels.size() - l.positives() == (m - 1 + 1) / 2);
      CHECK(l.positives() == (m - 1) / 2);
    }
  }
}

TEST_CASE("property: scale invariance of scores, thresholds and labels") {
  const auto f = oracle::random_matrix(25, 12, 77);
  auto g = f;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ud(0.1, 10.0);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double s = ud(gen);
    for (auto& x : g.row(i)) x = static_cast<float>(x * s);
  }
  const auto a = similarity_matrix(f);
  const auto b = similarity_matrix(g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].scores.size(); ++k) {
      // float rounding of the scaled rows bounds the agreement
      CHECK(std::abs(a[i].scores[k] - b[i].scores[k]) < 1e-6);
    }
    CHECK(std::abs(a[i].threshold - b[i].threshold) < 1e-6);
  }

  // Exact power-of-two scaling leaves everything bit-identical.
  auto h = f;
  for (auto& x : h.row(4)) x *= 4.0f;
  const auto c = similarity_matrix(h);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].scores.size(); ++k) CHECK(std::abs(a[i].scores[k] - c[i].scores[k]) <= 1e-12);
    CHECK(label_row(a[i]).labels == label_row(c[i]).labels);
  }
}

TEST_CASE("property: permuting non-reference rows permutes scores and labels") {
  const auto f = oracle::random_matrix(9, 5, 8);
  std::vector<std::size_t> perm{0, 3, 1, 8, 2, 7, 4, 6, 5};  // keeps row 0 in place
  RealMatrix g(9, 5);
  for (std::size_t r = 0; r < 9; ++r) std::copy(f.row(perm[r]).begin(), f.row(perm[r]).end(), g.row(r).begin());
  const auto a = similarity_matrix(f)[0];
  const auto b = similarity_matrix(g)[0];
  const auto la = label_row(a), lb = label_row(b);
  for (std::size_t r = 1; r < 9; ++r) {
    CHECK(b.scores[r - 1] == a.scores[perm[r] - 1]);
    CHECK(lb.labels[r - 1] == la.labels[perm[r] - 1]);
  }
  CHECK(a.threshold == b.threshold);
}

TEST_CASE("labels matrix round trip and validation") {
  const auto f = oracle::random_matrix(6, 4, 1);
  const auto labels = label_rows(similarity_matrix(f));
  const auto back = labels_from_matrix(labels_to_matrix(labels));
  for (std::size_t i = 0; i < labels.size(); ++i) CHECK(back[i].labels == labels[i].labels);

  CHECK_THROWS_AS(labels_from_matrix(RealMatrix(3, 3)), ValidationError);
  RealMatrix bad(3, 2, {0, 1, 0.5f, 1, 0, 1});
  CHECK_THROWS_AS(labels_from_matrix(bad), ValidationError);
}

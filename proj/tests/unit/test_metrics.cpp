#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lif/error.hpp"
#include "lif/metrics.hpp"
#include "oracles.hpp"

using namespace lif;
using doctest::Approx;

TEST_CASE("build_scores on a constructed two-identity set") {
  // identity 0 along x, identity 1 along y
  const RealMatrix e(4, 2, {1, 0, 1, 0, 0, 1, 0, 1});
  const std::vector<std::size_t> ids{0, 0, 1, 1};
  const auto s = build_scores(e, ids, Protocol::AllPairs);
  CHECK(s.genuine == std::vector<double>{1.0, 1.0});
  CHECK(s.impostor == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("build_scores counting and oracle equivalence") {
  const std::size_t k = 6, n = 5;
  const auto e = oracle::random_matrix(k * n, 7, 41);
  std::vector<std::size_t> ids(k * n);
  for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = r % k;  // interleaved identities
  const auto s = build_scores(e, ids, Protocol::AllPairs);
  CHECK(s.genuine.size() + s.impostor.size() == (k * n) * (k * n - 1) / 2);
  CHECK(s.genuine.size() == k * n * (n - 1) / 2);

  std::vector<double> g, im;
  for (std::size_t p = 0; p < e.rows(); ++p) {
    for (std::size_t q = 0; q < e.rows(); ++q) {
      if (q <= p) continue;
      (ids[p] == ids[q] ? g : im).push_back(oracle::cosine(e, p, q));
    }
  }
  auto a = s.genuine, b = s.impostor;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  REQUIRE(a.size() == g.size());
  REQUIRE(b.size() == im.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - g[i]) <= 1e-12);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - im[i]) <= 1e-12);
}

TEST_CASE("per-reference 1:N protocol") {
  const auto e = oracle::random_matrix(9, 4, 2);
  const std::vector<std::size_t> ids{0, 0, 0, 1, 1, 1, 2, 2, 2};
  const auto s = build_scores(e, ids, Protocol::PerReference1toN);
  CHECK(s.genuine.size() == 3 * 2);
  CHECK(s.impostor.size() == 3 * 6);
  CHECK(s.genuine[0] == Approx(oracle::cosine(e, 0, 1)));
}

TEST_CASE("build_scores errors") {
  const auto e = oracle::random_matrix(4, 3, 1);
  CHECK_THROWS_WITH_AS(build_scores(e, std::vector<std::size_t>{0, 0, 0, 0}, Protocol::AllPairs), "no impostor pairs",
                       ValidationError);
  CHECK_THROWS_AS(build_scores(e, std::vector<std::size_t>{0, 0, 0, 1}, Protocol::AllPairs), ValidationError);
  CHECK_THROWS_AS(build_scores(e, std::vector<std::size_t>{0, 1}, Protocol::AllPairs), ValidationError);
  CHECK(parse_protocol("per-reference-1toN") == Protocol::PerReference1toN);
  CHECK_THROWS_AS(parse_protocol("1:N"), ValidationError);
}

TEST_CASE("eer examples") {
  CHECK(eer({{0.9, 0.8}, {0.1, 0.2}}).eer == 0.0);
  CHECK(eer({{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}}).eer == 0.5);
  const ScoreSet s{{0.9, 0.8, 0.7, 0.4}, {0.6, 0.3, 0.2, 0.1}};
  const auto r = eer(s);
  CHECK(r.eer == 0.25);
  CHECK(r.eer == oracle::eer(s.genuine, s.impostor).first);
  CHECK(r.threshold == oracle::eer(s.genuine, s.impostor).second);
  CHECK(r.threshold == Approx(0.5));
}

TEST_CASE("fmr100 examples") {
  CHECK(fmr100({{0.9, 0.8}, {0.1, 0.2}}) == 0.0);
  CHECK(fmr100({{0.1, 0.2}, {0.8, 0.9}}) == 1.0);

  std::mt19937_64 gen(500);
  ScoreSet s{oracle::random_scores(500, 0.6, 0.15, gen), oracle::random_scores(500, 0.3, 0.15, gen)};
  CHECK(fmr100(s) == oracle::fmr100(s.genuine, s.impostor));
  CHECK(eer(s).eer == oracle::eer(s.genuine, s.impostor).first);
}

TEST_CASE("fdr examples and errors") {
  CHECK(fdr({{0.8, 1.0}, {0.1, 0.3}}) == Approx(12.25).epsilon(1e-12));
  CHECK(fdr({{0.1, 0.5}, {0.2, 0.4}}) == Approx(0.0));
  CHECK_THROWS_WITH_AS(fdr({{0.5, 0.5}, {0.1, 0.1}}), "degenerate distributions", ValidationError);
  CHECK_THROWS_AS(fdr({{0.5}, {0.1, 0.2}}), ValidationError);
}

TEST_CASE("property: fdr is invariant under a shared affine map") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 50; ++t) {
    ScoreSet s{oracle::random_scores(40, 0.5, 0.2, gen), oracle::random_scores(60, 0.1, 0.3, gen)};
    const double a = (t % 2 ? -1.0 : 1.0) * (0.5 + t * 0.1), b = t * 0.37 - 3.0;
    ScoreSet u = s;
    for (auto& x : u.genuine) x = a * x + b;
    for (auto& x : u.impostor) x = a * x + b;
    CHECK(fdr(u) == Approx(fdr(s)).epsilon(1e-10));
    CHECK(fdr(s) == Approx(oracle::fdr(s.genuine, s.impostor)).epsilon(1e-12));
  }
}

TEST_CASE("property: eer and fmr100 survive strictly increasing transforms") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 30; ++t) {
    ScoreSet s{oracle::random_scores(50 + t, 0.4, 0.2, gen), oracle::random_scores(200, 0.0, 0.2, gen)};
    ScoreSet u = s;
    auto f = [](double x) { return std::exp(3.0 * x) + x; };
    std::transform(u.genuine.begin(), u.genuine.end(), u.genuine.begin(), f);
    std::transform(u.impostor.begin(), u.impostor.end(), u.impostor.begin(), f);
    CHECK(eer(u).eer == eer(s).eer);
    CHECK(fmr100(u) == fmr100(s));
  }
}

TEST_CASE("property: negation with role swap and the EER crossing bound") {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 30; ++t) {
    ScoreSet s{oracle::random_scores(30 + t, 0.3, 0.2, gen), oracle::random_scores(80, 0.0, 0.2, gen)};
    ScoreSet neg;
    for (double x : s.impostor) neg.genuine.push_back(-x);
    for (double x : s.genuine) neg.impostor.push_back(-x);
    const double bound = 1.0 / static_cast<double>(std::min(s.genuine.size(), s.impostor.size()));
    CHECK(std::abs(eer(s).eer - eer(neg).eer) <= bound);

    const auto r = eer(s);
    const auto at = error_rates_at(s, r.threshold);
    CHECK(std::abs(at.fmr - at.fnmr) <= bound);
    CHECK(r.eer == Approx((at.fmr + at.fnmr) / 2));
  }
}

TEST_CASE("det curve is monotone") {
  std::mt19937_64 gen(8);
  ScoreSet s{oracle::random_scores(100, 0.5, 0.2, gen), oracle::random_scores(100, 0.2, 0.2, gen)};
  const auto curve = det_curve(s);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].threshold > curve[k - 1].threshold);
    CHECK(curve[k].fmr <= curve[k - 1].fmr);
    CHECK(curve[k].fnmr >= curve[k - 1].fnmr);
  }
  CHECK(curve.back().fmr == 0.0);
  CHECK(curve.back().fnmr == 1.0);
}

TEST_CASE("borda examples") {
  const RealMatrix two(2, 3, {0.9f, 0.8f, 0.7f, 0.5f, 0.4f, 0.3f});
  CHECK(borda_count(two) == std::vector<double>{3.0, 0.0});

  const RealMatrix tied(3, 2, {0.5f, 0.5f, 0.5f, 0.5f, 0.5f, 0.5f});
  const auto t = borda_count(tied);
  CHECK(t[0] == t[1]);
  CHECK(t[1] == t[2]);
  CHECK(t[0] == 2.0);  // each benchmark distributes 0+1+2 evenly

  const RealMatrix partial(3, 1, {0.9f, 0.7f, 0.9f});
  CHECK(borda_count(partial) == std::vector<double>{1.5, 0.0, 1.5});
}

TEST_CASE("borda on a seeded 4x5 table matches the rank-sum oracle and ignores monotone transforms") {
  auto acc = oracle::random_matrix(4, 5, 13);
  for (auto& x : acc.data()) x = std::round(x * 4.0f) / 4.0f;  // force a few ties
  CHECK(borda_count(acc) == oracle::borda(acc));
  auto u = acc;
  for (std::size_t b = 0; b < 5; ++b) {
    for (std::size_t r = 0; r < 4; ++r) u(r, b) = std::exp(acc(r, b)) * (b + 1) + 7.0f * b;
  }
  CHECK(borda_count(u) == borda_count(acc));
}

TEST_CASE("one_to_n_summary") {
  const std::vector<float> ref{0.6f, 0.8f};
  const RealMatrix same(3, 2, {0.6f, 0.8f, 1.2f, 1.6f, 3.0f, 4.0f});
  const auto a = one_to_n_summary(ref, same);
  for (double s : a.scores) CHECK(s == Approx(1.0));
  CHECK(a.mean == Approx(1.0));

  const RealMatrix ortho(2, 2, {-0.8f, 0.6f, 0.8f, -0.6f});
  CHECK(one_to_n_summary(ref, ortho).mean == Approx(0.0));
  CHECK_THROWS_AS(one_to_n_summary(ref, RealMatrix(1, 3, {1, 0, 0})), ValidationError);
}

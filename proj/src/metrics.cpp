#include "lif/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "lif/error.hpp"
#include "lif/similarity.hpp"

namespace lif {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mu) {
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

double rate(std::size_t count, std::size_t total) { return static_cast<double>(count) / static_cast<double>(total); }

// Walks the sweep once over sorted copies of both lists.
template <class Visit>
void walk_sweep(const ScoreSet& s, Visit&& visit) {
  std::vector<double> g = s.genuine;
  std::vector<double> im = s.impostor;
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  std::size_t g_below = 0;   // genuine strictly below t
  std::size_t im_below = 0;  // impostor strictly below t
  for (double t : sweep_thresholds(s)) {
    while (g_below < g.size() && g[g_below] < t) ++g_below;
    while (im_below < im.size() && im[im_below] < t) ++im_below;
    visit(t, ErrorRates{rate(im.size() - im_below, im.size()), rate(g_below, g.size())});
  }
}

}  // namespace

void ScoreSet::validate() const {
  if (genuine.empty()) throw ValidationError("score set has no genuine scores");
  if (impostor.empty()) throw ValidationError("score set has no impostor scores");
  auto finite = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }); };
  if (!finite(genuine) || !finite(impostor)) throw ValidationError("score set holds non-finite scores");
}

std::string_view to_string(Protocol p) noexcept {
  return p == Protocol::AllPairs ? "all-pairs" : "per-reference-1toN";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "all-pairs") return Protocol::AllPairs;
  if (text == "per-reference-1toN") return Protocol::PerReference1toN;
  throw ValidationError("unknown protocol: " + std::string(text));
}

ScoreSet build_scores(const RealMatrix& embeddings, std::span<const std::size_t> identities, Protocol protocol) {
  const std::size_t n = embeddings.rows();
  if (identities.size() != n) throw ValidationError("identities do not align with embeddings");

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < n; ++r) members[identities[r]].push_back(r);
  if (members.size() < 2) throw ValidationError("no impostor pairs");
  for (const auto& [id, rows] : members) {
    if (rows.size() < 2) throw ValidationError("identity " + std::to_string(id) + " has fewer than 2 samples");
  }

  std::vector<double> norms(n);
  for (std::size_t r = 0; r < n; ++r) {
    double sq = 0.0;
    for (float v : embeddings.row(r)) sq += static_cast<double>(v) * static_cast<double>(v);
    norms[r] = std::sqrt(sq);
    if (norms[r] == 0.0) throw ValidationError("degenerate embedding at row " + std::to_string(r));
  }
  auto score = [&](std::size_t p, std::size_t q) {
    const auto a = embeddings.row(p);
    const auto b = embeddings.row(q);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
    return std::clamp(s / (norms[p] * norms[q]), -1.0, 1.0);
  };

  ScoreSet out;
  if (protocol == Protocol::AllPairs) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        (identities[p] == identities[q] ? out.genuine : out.impostor).push_back(score(p, q));
      }
    }
  } else {
    for (const auto& [id, rows] : members) {
      const std::size_t ref = rows.front();
      for (std::size_t q = 0; q < n; ++q) {
        if (q == ref) continue;
        (identities[q] == id ? out.genuine : out.impostor).push_back(score(ref, q));
      }
    }
  }
  return out;
}

ErrorRates error_rates_at(const ScoreSet& s, double threshold) {
  const auto im_match = std::count_if(s.impostor.begin(), s.impostor.end(), [&](double x) { return x >= threshold; });
  const auto g_miss = std::count_if(s.genuine.begin(), s.genuine.end(), [&](double x) { return x < threshold; });
  return {rate(static_cast<std::size_t>(im_match), s.impostor.size()), rate(static_cast<std::size_t>(g_miss), s.genuine.size())};
}

std::vector<double> sweep_thresholds(const ScoreSet& s) {
  std::vector<double> all;
  all.reserve(s.genuine.size() + s.impostor.size());
  all.insert(all.end(), s.genuine.begin(), s.genuine.end());
  all.insert(all.end(), s.impostor.begin(), s.impostor.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> out;
  out.reserve(2 * all.size() + 1);
  for (std::size_t k = 0; k < all.size(); ++k) {
    out.push_back(all[k]);
    if (k + 1 < all.size()) out.push_back(0.5 * (all[k] + all[k + 1]));
  }
  if (!all.empty()) out.push_back(std::nextafter(all.back(), std::numeric_limits<double>::infinity()));
  return out;
}

EerResult eer(const ScoreSet& s) {
  s.validate();
  double best_gap = std::numeric_limits<double>::infinity();
  EerResult best;
  walk_sweep(s, [&](double t, ErrorRates r) {
    const double gap = std::abs(r.fmr - r.fnmr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {(r.fmr + r.fnmr) / 2.0, t};
    }
  });
  return best;
}

double fmr100(const ScoreSet& s) {
  s.validate();
  double best = 1.0;
  walk_sweep(s, [&](double, ErrorRates r) {
    if (r.fmr <= 0.01) best = std::min(best, r.fnmr);
  });
  return best;
}

double fdr(const ScoreSet& s) {
  if (s.genuine.size() < 2 || s.impostor.size() < 2) {
    throw ValidationError("fdr: need at least 2 genuine and 2 impostor scores");
  }
  const double mg = mean_of(s.genuine);
  const double mi = mean_of(s.impostor);
  const double vg = sample_variance(s.genuine, mg);
  const double vi = sample_variance(s.impostor, mi);
  if (vg + vi == 0.0) throw ValidationError("degenerate distributions");
  return (mg - mi) * (mg - mi) / (vg + vi);
}

nlohmann::json VerificationReport::to_json() const {
  return {{"eer", eer}, {"fmr100", fmr100}, {"fdr", fdr}, {"threshold", threshold},
          {"n_genuine", n_genuine}, {"n_impostor", n_impostor}};
}

VerificationReport verify(const ScoreSet& s) {
  VerificationReport r;
  const auto e = eer(s);
  r.eer = e.eer;
  r.threshold = e.threshold;
  r.fmr100 = fmr100(s);
  r.fdr = fdr(s);
  r.n_genuine = s.genuine.size();
  r.n_impostor = s.impostor.size();
  return r;
}

std::vector<DetPoint> det_curve(const ScoreSet& s) {
  s.validate();
  std::vector<DetPoint> out;
  walk_sweep(s, [&](double t, ErrorRates r) { out.push_back({t, r.fmr, r.fnmr}); });
  return out;
}

void write_det_csv(const std::filesystem::path& path, const std::vector<DetPoint>& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(17);
  out << "threshold,fmr,fnmr\n";
  for (const auto& p : curve) out << p.threshold << ',' << p.fmr << ',' << p.fnmr << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> borda_count(const RealMatrix& accuracies) {
  const std::size_t k = accuracies.rows();
  std::vector<double> total(k, 0.0);
  if (k == 0) return total;
  std::vector<std::size_t> order(k);
  for (std::size_t col = 0; col < accuracies.cols(); ++col) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return accuracies(a, col) > accuracies(b, col); });
    // Position p (0-based) is worth k-1-p points; ties average over their positions.
    for (std::size_t start = 0; start < k;) {
      std::size_t end = start + 1;
      while (end < k && accuracies(order[end], col) == accuracies(order[start], col)) ++end;
      const double first = static_cast<double>(k - 1 - start);
      const double last = static_cast<double>(k - end);
      const double share = (first + last) / 2.0;
      for (std::size_t p = start; p < end; ++p) total[order[p]] += share;
      start = end;
    }
  }
  return total;
}

OneToNSummary one_to_n_summary(std::span<const float> reference, const RealMatrix& samples) {
  if (samples.rows() == 0) throw ValidationError("one_to_n_summary: no samples");
  if (samples.cols() != reference.size()) throw ValidationError("one_to_n_summary: dimension mismatch");
  OneToNSummary out;
  out.scores.reserve(samples.rows());
  for (std::size_t r = 0; r < samples.rows(); ++r) out.scores.push_back(cosine_similarity(reference, samples.row(r)));
  out.mean = mean_of(out.scores);
  return out;
}

}  // namespace lif

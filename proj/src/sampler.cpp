#include "lif/sampler.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lif/error.hpp"
#include "lif/parallel.hpp"

namespace lif {

std::string_view to_string(SamplingMode mode) noexcept {
  switch (mode) {
    case SamplingMode::HalfNormal:
      return "half-normal";
    case SamplingMode::LiteralGaussian:
      return "literal-gaussian";
    case SamplingMode::SignCorrected:
      return "sign-corrected";
  }
  return "unknown";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "half-normal") return SamplingMode::HalfNormal;
  if (text == "literal-gaussian") return SamplingMode::LiteralGaussian;
  if (text == "sign-corrected") return SamplingMode::SignCorrected;
  throw ValidationError("unknown sampling mode: " + std::string(text));
}

std::string_view to_string(Side side) noexcept { return side == Side::Positive ? "pos" : "neg"; }

void SamplingConfig::validate() const {
  if (!(max_off > 0.0) || !std::isfinite(max_off)) throw ValidationError("max-off must be positive");
  if (appearances < 1) throw ValidationError("appearances must be >= 1");
}

std::vector<double> sample_offset(std::size_t d, double max_off, SamplingMode mode, Rng& rng) {
  std::vector<double> o(d);
  for (auto& v : o) {
    v = rng.normal(0.0, max_off);
    if (mode == SamplingMode::HalfNormal) v = std::abs(v);
  }
  return o;
}

LatentPair make_latent_pair(std::span<const double> w, std::span<const double> normal, std::span<const double> offset,
                            SamplingMode mode) {
  const std::size_t d = w.size();
  if (normal.size() != d || offset.size() != d) throw ValidationError("make_latent_pair: dimension mismatch");
  std::vector<double> t(d);
  double along = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    t[k] = offset[k] * normal[k];
    along += t[k] * normal[k];
  }
  if (mode == SamplingMode::SignCorrected && along < 0.0) {
    for (auto& v : t) v = -v;
  }
  LatentPair p{std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t k = 0; k < d; ++k) {
    p.positive[k] = w[k] + t[k];
    p.negative[k] = w[k] - t[k];
  }
  return p;
}

GeneratedDataset generate_dataset(const RealMatrix& latents, const BoundarySet& boundaries, const SamplingConfig& cfg,
                                  std::size_t jobs) {
  cfg.validate();
  const std::size_t d = latents.cols();
  if (boundaries.dimension != d) {
    throw ValidationError("dimension mismatch: latents d=" + std::to_string(d) +
                          ", boundaries d=" + std::to_string(boundaries.dimension));
  }
  if (boundaries.references != latents.rows()) {
    throw ValidationError("boundaries cover " + std::to_string(boundaries.references) + " references but latents have " +
                          std::to_string(latents.rows()) + " rows");
  }
  if (boundaries.boundaries.empty()) throw ValidationError("no boundaries to sample from");

  const std::size_t a_count = cfg.appearances;
  const std::size_t per_ref = 2 * a_count;
  GeneratedDataset out;
  out.latents = RealMatrix(boundaries.boundaries.size() * per_ref, d);
  out.records.resize(out.latents.rows());

  parallel_for(boundaries.boundaries.size(), jobs, [&](std::size_t b) {
    const auto& boundary = boundaries.boundaries[b];
    if (boundary.normal.size() != d) throw ValidationError("dimension mismatch in boundary " + std::to_string(b));
    const std::size_t i = boundary.reference;
    const auto w = latents.row_as_double(i);
    const std::size_t base = b * per_ref;
    for (std::size_t a = 0; a < a_count; ++a) {
      const std::uint64_t seed = derive_seed(cfg.seed, {i, a});
      Rng rng(seed);
      const auto offset = sample_offset(d, cfg.max_off, cfg.mode, rng);
      const auto pair = make_latent_pair(w, boundary.normal, offset, cfg.mode);
      out.latents.set_row(base + a, pair.positive);
      out.latents.set_row(base + a_count + a, pair.negative);
      out.records[base + a] = {i, Side::Positive, a, seed};
      out.records[base + a_count + a] = {i, Side::Negative, a, seed};
    }
  });
  return out;
}

void write_records_jsonl(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& r : records) {
    nlohmann::json j{{"ref", r.reference}, {"side", to_string(r.side)}, {"app", r.appearance}, {"seed", r.seed}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SampleRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<SampleRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SampleRecord r;
      r.reference = j.at("ref").get<std::size_t>();
      const auto side = j.at("side").get<std::string>();
      if (side == "pos") r.side = Side::Positive;
      else if (side == "neg") r.side = Side::Negative;
      else throw ValidationError("bad side '" + side + "'");
      r.appearance = j.at("app").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace lif

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lif/matrix.hpp"
#include "lif/rng.hpp"
#include "lif/svm.hpp"

namespace lif {

/// How the per-dimension offset o is drawn.
///  - HalfNormal:      o_k = |g_k|, so every displacement lies on the declared side.
///  - LiteralGaussian: o_k = g_k, exactly as drawn; the side is not guaranteed.
///  - SignCorrected:   o_k = g_k, then o is negated if (o * n).n < 0.
/// In all modes g_k ~ Normal(0, sigma = max_off).
enum class SamplingMode { HalfNormal, LiteralGaussian, SignCorrected };

[[nodiscard]] std::string_view to_string(SamplingMode mode) noexcept;
/// Accepts "half-normal", "literal-gaussian", "sign-corrected".
[[nodiscard]] SamplingMode parse_sampling_mode(std::string_view text);

struct SamplingConfig {
  double max_off = 10.0;
  std::size_t appearances = 1;
  SamplingMode mode = SamplingMode::HalfNormal;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Side : std::uint8_t { Positive, Negative };

[[nodiscard]] std::string_view to_string(Side side) noexcept;

struct SampleRecord {
  std::size_t reference = 0;
  Side side = Side::Positive;
  std::size_t appearance = 0;
  std::uint64_t seed = 0;  ///< seed of the offset draw shared by both sides

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct GeneratedDataset {
  RealMatrix latents;
  std::vector<SampleRecord> records;  ///< one per latents row
};

[[nodiscard]] std::vector<double> sample_offset(std::size_t d, double max_off, SamplingMode mode, Rng& rng);

struct LatentPair {
  std::vector<double> positive;  ///< w + o*n
  std::vector<double> negative;  ///< w - o*n
};

/// Elementwise displacement t = o * n; under SignCorrected the offset is negated
/// when t.n < 0.
[[nodiscard]] LatentPair make_latent_pair(std::span<const double> w, std::span<const double> normal,
                                          std::span<const double> offset, SamplingMode mode);

/// For each trained boundary (in reference order) and each appearance a, draws
/// one offset from Rng(derive_seed(cfg.seed, {i, a})) and emits both sides.
/// Rows of reference i are laid out as `appearances` positive rows followed by
/// `appearances` negative rows.
[[nodiscard]] GeneratedDataset generate_dataset(const RealMatrix& latents, const BoundarySet& boundaries,
                                                const SamplingConfig& cfg, std::size_t jobs = 1);

/// One JSON object per line: {"app":a,"ref":i,"seed":s,"side":"pos"|"neg"}.
void write_records_jsonl(const std::filesystem::path& path, const std::vector<SampleRecord>& records);
[[nodiscard]] std::vector<SampleRecord> read_records_jsonl(const std::filesystem::path& path);

}  // namespace lif

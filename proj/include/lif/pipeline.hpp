#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lif/metrics.hpp"
#include "lif/sampler.hpp"
#include "lif/svm.hpp"
#include "lif/toy_world.hpp"

// File-level stages. Every stage checks its inputs against the manifests that
// produced them, writes its outputs, then writes `<stage>.manifest.json` with
// digests of everything it read and wrote.
namespace lif::pipeline {

namespace fs = std::filesystem;

/// Default file names inside a workspace.
inline constexpr const char* kLatentsFile = "W.lidm";
inline constexpr const char* kEmbeddingsFile = "F.lidm";
inline constexpr const char* kDirectionFile = "u.lidm";
inline constexpr const char* kSimilarityFile = "similarity.lidm";
inline constexpr const char* kThresholdsFile = "thresholds.lidm";
inline constexpr const char* kLabelsFile = "labels.lidm";
inline constexpr const char* kBoundariesFile = "boundaries.lidm";
inline constexpr const char* kBoundaryStatsFile = "boundaries.stats.json";

struct ToyGenOptions {
  std::size_t m = 500;
  ToyConfig toy;
  fs::path workspace;
};

/// Writes W.lidm, F.lidm, u.lidm and toy.manifest.json (which embeds u).
void toy_gen(const ToyGenOptions& opt);

/// Rebuilds the ToyWorld recorded in `<workspace>/toy.manifest.json`.
[[nodiscard]] ToyWorld load_toy_world(const fs::path& workspace);

/// Embeds `latents` with the workspace's toy world and writes `out`.
void toy_embed(const fs::path& workspace, const fs::path& latents, const fs::path& out, std::size_t jobs = 1);

struct LabelOptions {
  fs::path latents;
  fs::path embeddings;
  fs::path out_dir;
  bool csv = false;
  std::size_t jobs = 1;
};

struct LabelResult {
  std::size_t m = 0;
  std::vector<std::size_t> degenerate;  ///< references whose labels have one class only
};

LabelResult label(const LabelOptions& opt);

struct BoundaryOptions {
  fs::path latents;
  fs::path labels;
  fs::path out_dir;
  SvmConfig svm;
  std::size_t jobs = 1;
};

/// Returns the trained set; failed references are listed in its `failures`.
BoundarySet boundaries(const BoundaryOptions& opt);

struct GenerateOptions {
  fs::path latents;
  fs::path boundaries;
  fs::path out_dir;
  std::string prefix = "dataset";  ///< outputs <prefix>.lidm and <prefix>.records.jsonl
  SamplingConfig sampling;
  std::size_t jobs = 1;
};

std::size_t generate(const GenerateOptions& opt);

enum class ClassFilter { Positive, Negative, Both };
[[nodiscard]] ClassFilter parse_class_filter(const std::string& text);
[[nodiscard]] std::string to_string(ClassFilter c);

/// Identity of a generated row: positive side of reference i is identity 2i,
/// negative side is 2i+1.
[[nodiscard]] std::size_t identity_of(const SampleRecord& r) noexcept;

struct EvaluateOptions {
  fs::path embeddings;
  fs::path records;
  Protocol protocol = Protocol::AllPairs;
  ClassFilter classes = ClassFilter::Both;
  std::size_t max_refs = 0;  ///< 0 = every reference in the records
  std::optional<fs::path> reference_embeddings;  ///< enables the 1:N summary
  std::optional<fs::path> det_csv;
  fs::path out;  ///< report JSON
};

/// Per-reference comparison of cross-side against within-side similarity.
struct SideSeparation {
  std::size_t references = 0;
  std::size_t violations = 0;  ///< references where cross-side mean >= within-side mean
  double min_margin = 0.0;     ///< min over references of (within - cross)
  double mean_within = 0.0;
  double mean_cross = 0.0;
};

[[nodiscard]] SideSeparation side_separation(const RealMatrix& embeddings, const std::vector<SampleRecord>& records);

/// Writes the report and returns it.
nlohmann::json evaluate(const EvaluateOptions& opt);

/// Reads an accuracy table (LIDM, or CSV with one model per line) and returns
/// {"scores": [...]}; also written to `out` when non-empty.
nlohmann::json borda(const fs::path& table, const fs::path& out);

struct ToyE2eOptions {
  std::uint64_t seed = 0;  ///< master seed; overrides toy.seed and svm.seed
  std::size_t m = 500;
  ToyConfig toy;
  std::vector<double> max_offs = {10.0, 20.0, 30.0, 40.0};
  std::size_t appearances = 20;
  std::size_t eval_refs = 100;
  SamplingMode mode = SamplingMode::HalfNormal;
  SvmConfig svm;
  double recovery_cosine = 0.9;
  std::size_t jobs = 1;
  fs::path workspace;
};

/// toy gen -> label -> boundaries -> (generate -> embed -> evaluate) per max-off.
/// Writes and returns `<workspace>/summary.json`.
nlohmann::json toy_e2e(const ToyE2eOptions& opt);

}  // namespace lif::pipeline

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace lif {

/// Hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Per-stage record written next to the stage outputs as `<stage>.manifest.json`.
///
/// `inputs` and `outputs` map file names (no directory) to their digests.
struct RunManifest {
  std::string stage;
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> d;
  std::optional<std::size_t> l;
  std::optional<std::size_t> m;
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  nlohmann::json extra = nlohmann::json::object();

  void record_input(const std::filesystem::path& path);
  void record_output(const std::filesystem::path& path);

  /// Throws ValidationError when d < 2, l < 2 or m < 3 for the fields that are set.
  void validate() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

[[nodiscard]] std::filesystem::path manifest_path(const std::filesystem::path& dir, const std::string& stage);

/// Writes `<dir>/<stage>.manifest.json` with sorted keys and a trailing newline.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

[[nodiscard]] RunManifest read_manifest(const std::filesystem::path& path);

/// Rejects a stale input: if any manifest in the file's directory lists it as an
/// output, the recorded digest must match the file on disk.
void check_input_fresh(const std::filesystem::path& path);

/// Writes JSON with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace lif

#include "lif/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "lif/error.hpp"

namespace lif {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    hex.push_back(kHex[md[k] >> 4]);
    hex.push_back(kHex[md[k] & 0xF]);
  }
  return hex;
}

void RunManifest::record_input(const fs::path& path) { inputs[path.filename().string()] = sha256_file(path); }

void RunManifest::record_output(const fs::path& path) { outputs[path.filename().string()] = sha256_file(path); }

void RunManifest::validate() const {
  if (d && *d < 2) throw ValidationError("manifest: d must be >= 2");
  if (l && *l < 2) throw ValidationError("manifest: l must be >= 2");
  if (m && *m < 3) throw ValidationError("manifest: m must be >= 3");
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["stage"] = stage;
  j["master_seed"] = master_seed;
  j["d"] = d ? nlohmann::json(*d) : nlohmann::json(nullptr);
  j["l"] = l ? nlohmann::json(*l) : nlohmann::json(nullptr);
  j["m"] = m ? nlohmann::json(*m) : nlohmann::json(nullptr);
  j["params"] = params;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest r;
  r.stage = j.at("stage").get<std::string>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  auto opt = [&](const char* key) -> std::optional<std::size_t> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::size_t>();
  };
  r.d = opt("d");
  r.l = opt("l");
  r.m = opt("m");
  r.params = j.value("params", std::map<std::string, std::string>{});
  r.inputs = j.value("inputs", std::map<std::string, std::string>{});
  r.outputs = j.value("outputs", std::map<std::string, std::string>{});
  if (j.contains("extra")) r.extra = j.at("extra");
  return r;
}

fs::path manifest_path(const fs::path& dir, const std::string& stage) { return dir / (stage + ".manifest.json"); }

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  manifest.validate();
  write_json(manifest_path(dir, manifest.stage), manifest.to_json());
}

RunManifest read_manifest(const fs::path& path) {
  try {
    return RunManifest::from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed manifest: " + e.what());
  }
}

void check_input_fresh(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing input: " + path.string());
  const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const auto name = path.filename().string();
  std::string digest;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto fname = entry.path().filename().string();
    if (!entry.is_regular_file() || !fname.ends_with(".manifest.json")) continue;
    const auto manifest = read_manifest(entry.path());
    const auto it = manifest.outputs.find(name);
    if (it == manifest.outputs.end()) continue;
    if (digest.empty()) digest = sha256_file(path);
    if (it->second != digest) {
      throw ValidationError("stale input " + path.string() + ": digest differs from " + fname);
    }
  }
}

}  // namespace lif

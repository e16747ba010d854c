#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "lif/lidm_io.hpp"
#include "lif/manifest.hpp"
#include "lif/pipeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lif;

namespace {

const std::string kCli = LIF_CLI_PATH;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : env + " ") + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lif_pipe_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("label: toy 3x2 inputs, mismatched m, reproducibility") {
  const auto ws = fresh("label");
  REQUIRE(run("toy gen --m 3 --d 2 --seed 4 --workspace " + ws.string()) == 0);
  REQUIRE(run("label --csv --workspace " + ws.string()) == 0);
  const auto sim = read_matrix(ws / "similarity.lidm");
  CHECK(sim.rows() == 3);
  CHECK(sim.cols() == 2);
  CHECK(read_matrix(ws / "labels.lidm").rows() == 3);
  CHECK(read_matrix(ws / "thresholds.lidm").cols() == 1);
  CHECK(fs::exists(ws / "labels.csv"));
  CHECK(fs::exists(ws / "label.manifest.json"));

  const auto first = slurp(ws / "labels.lidm");
  const auto first_sim = slurp(ws / "similarity.lidm");
  REQUIRE(run("label --workspace " + ws.string()) == 0);
  CHECK(slurp(ws / "labels.lidm") == first);
  CHECK(slurp(ws / "similarity.lidm") == first_sim);

  write_matrix(ws / "F4.lidm", oracle::random_matrix(4, 2, 1));
  CHECK(run("label --workspace " + ws.string() + " --embeddings " + (ws / "F4.lidm").string()) == 2);
  CHECK(run("label --workspace " + ws.string() + " --embeddings " + (ws / "missing.lidm").string()) == 3);
}

TEST_CASE("boundaries: row count, degenerate labels, determinism, stale inputs") {
  const auto ws = fresh("bnd");
  REQUIRE(run("toy gen --m 40 --d 4 --seed 2 --workspace " + ws.string()) == 0);
  REQUIRE(run("label --workspace " + ws.string()) == 0);
  REQUIRE(run("boundaries --seed 5 --workspace " + ws.string()) == 0);
  const auto b = read_matrix(ws / "boundaries.lidm");
  CHECK(b.rows() == 40);
  CHECK(b.cols() == 5);
  const auto bytes = slurp(ws / "boundaries.lidm");
  const auto stats = slurp(ws / "boundaries.stats.json");
  REQUIRE(run("boundaries --seed 5 --jobs 3 --workspace " + ws.string()) == 0);
  CHECK(slurp(ws / "boundaries.lidm") == bytes);
  CHECK(slurp(ws / "boundaries.stats.json") == stats);

  // LIF_SEED overrides --seed
  REQUIRE(run("boundaries --seed 1 --workspace " + ws.string(), "LIF_SEED=5") == 0);
  CHECK(slurp(ws / "boundaries.lidm") == bytes);
  CHECK(run("boundaries --workspace " + ws.string(), "LIF_SEED=abc") == 2);

  // all-one labels
  const auto dir = fresh("bnd_ones");
  write_matrix(dir / "W.lidm", oracle::random_matrix(5, 3, 1));
  RealMatrix ones(5, 4);
  for (auto& x : ones.data()) x = 1.0f;
  write_matrix(dir / "labels.lidm", ones);
  CHECK(run("boundaries --workspace " + dir.string()) == 2);

  // rewriting W behind the label stage's back is caught downstream
  write_matrix(ws / "W.lidm", oracle::random_matrix(40, 4, 99));
  CHECK(run("boundaries --workspace " + ws.string()) == 2);
}

TEST_CASE("generate: row counts and validation") {
  const auto ws = fresh("gen");
  write_matrix(ws / "W.lidm", oracle::random_matrix(2, 3, 1));
  write_matrix(ws / "boundaries.lidm", RealMatrix(2, 4, {1, 0, 0, 0, 0, 0.6f, 0.8f, 0.1f}));
  REQUIRE(run("generate --appearances 1 --max-off 10 --workspace " + ws.string()) == 0);
  CHECK(read_matrix(ws / "dataset.lidm").rows() == 4);
  CHECK(read_records_jsonl(ws / "dataset.records.jsonl").size() == 4);

  CHECK(run("generate --max-off 0 --workspace " + ws.string()) == 2);
  CHECK(run("generate --max-off -3 --workspace " + ws.string()) == 2);
  CHECK(run("generate --mode bogus --workspace " + ws.string()) == 2);

  const auto toy = fresh("gen_toy");
  REQUIRE(run("toy gen --m 12 --d 4 --seed 8 --workspace " + toy.string()) == 0);
  REQUIRE(run("label --workspace " + toy.string()) == 0);
  REQUIRE(run("boundaries --workspace " + toy.string()) == 0);
  REQUIRE(run("generate --appearances 7 --max-off 20 --seed 3 --workspace " + toy.string()) == 0);
  CHECK(read_matrix(toy / "dataset.lidm").rows() == 2 * 12 * 7);
  const auto a = slurp(toy / "dataset.lidm");
  REQUIRE(run("generate --appearances 7 --max-off 20 --seed 3 --workspace " + toy.string()) == 0);
  CHECK(slurp(toy / "dataset.lidm") == a);
}

TEST_CASE("evaluate: perfectly separated identities and oracle recomputation") {
  const auto ws = fresh("eval");
  // reference 0: positive side along e1, negative side along e2
  const RealMatrix e(4, 2, {1, 0, 1, 0.01f, 0, 1, 0.01f, 1});
  write_matrix(ws / "E.lidm", e);
  write_records_jsonl(ws / "r.jsonl", {{0, Side::Positive, 0, 1}, {0, Side::Positive, 1, 2},
                                       {0, Side::Negative, 0, 1}, {0, Side::Negative, 1, 2}});
  REQUIRE(run("evaluate --embeddings " + (ws / "E.lidm").string() + " --records " + (ws / "r.jsonl").string() +
              " --det-csv " + (ws / "det.csv").string() + " --out " + (ws / "report.json").string()) == 0);
  const auto report = read_json(ws / "report.json");
  CHECK(report.at("eer").get<double>() == 0.0);
  CHECK(report.at("n_genuine").get<int>() == 2);
  CHECK(report.at("n_impostor").get<int>() == 4);
  CHECK(fs::exists(ws / "det.csv"));

  CHECK(run("evaluate --embeddings " + (ws / "E.lidm").string() + " --records " + (ws / "r.jsonl").string() +
            " --protocol nope --out " + (ws / "x.json").string()) == 2);
  CHECK(run("evaluate --embeddings " + (ws / "E.lidm").string() + " --records " + (ws / "r.jsonl").string() +
            " --classes pos --out " + (ws / "x.json").string()) == 2);  // one identity only

  // library-level recomputation on a toy dataset
  const auto toy = fresh("eval_toy");
  REQUIRE(run("toy gen --m 10 --d 4 --seed 2 --workspace " + toy.string()) == 0);
  REQUIRE(run("label --workspace " + toy.string()) == 0);
  REQUIRE(run("boundaries --workspace " + toy.string()) == 0);
  REQUIRE(run("generate --appearances 4 --workspace " + toy.string()) == 0);
  REQUIRE(run("toy embed --workspace " + toy.string() + " --latents " + (toy / "dataset.lidm").string() + " --out " +
              (toy / "dataset.emb.lidm").string()) == 0);
  REQUIRE(run("evaluate --embeddings " + (toy / "dataset.emb.lidm").string() + " --records " +
              (toy / "dataset.records.jsonl").string() + " --out " + (toy / "report.json").string()) == 0);
  const auto rep = read_json(toy / "report.json");
  const auto emb = read_matrix(toy / "dataset.emb.lidm");
  const auto recs = read_records_jsonl(toy / "dataset.records.jsonl");
  std::vector<std::size_t> ids;
  for (const auto& r : recs) ids.push_back(pipeline::identity_of(r));
  const auto s = build_scores(emb, ids, Protocol::AllPairs);
  CHECK(rep.at("eer").get<double>() == oracle::eer(s.genuine, s.impostor).first);
  CHECK(rep.at("fmr100").get<double>() == oracle::fmr100(s.genuine, s.impostor));
  CHECK(rep.at("fdr").get<double>() == doctest::Approx(oracle::fdr(s.genuine, s.impostor)).epsilon(1e-12));
}

TEST_CASE("borda subcommand reads CSV and LIDM tables") {
  const auto ws = fresh("borda");
  {
    std::ofstream out(ws / "acc.csv");
    out << "0.9,0.8,0.7\n0.5,0.4,0.3\n";
  }
  const auto j = pipeline::borda(ws / "acc.csv", ws / "bc.json");
  CHECK(j.at("scores") == nlohmann::json::array({3.0, 0.0}));
  CHECK(run("borda --table " + (ws / "acc.csv").string()) == 0);
  write_matrix(ws / "acc.lidm", RealMatrix(2, 1, {0.1f, 0.2f}));
  CHECK(pipeline::borda(ws / "acc.lidm", "").at("scores") == nlohmann::json::array({0.0, 1.0}));
  {
    std::ofstream out(ws / "bad.csv");
    out << "0.9,x\n";
  }
  CHECK(run("borda --table " + (ws / "bad.csv").string()) == 2);
}

TEST_CASE("side separation sees two identities per reference") {
  const RealMatrix e(4, 2, {1, 0, 0.9f, 0.1f, -1, 0, -0.9f, -0.1f});
  const std::vector<SampleRecord> recs{{0, Side::Positive, 0, 0}, {0, Side::Positive, 1, 0},
                                       {0, Side::Negative, 0, 0}, {0, Side::Negative, 1, 0}};
  const auto sep = pipeline::side_separation(e, recs);
  CHECK(sep.references == 1);
  CHECK(sep.violations == 0);
  CHECK(sep.mean_cross < 0);
  CHECK(sep.mean_within > 0.9);
}

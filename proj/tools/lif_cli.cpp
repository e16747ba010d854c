// lif: command-line front end for the identity-direction pipeline.
//
//   lif toy gen     --m 500 --d 16 --seed 1 --workspace ws
//   lif label       --workspace ws
//   lif boundaries  --workspace ws --c 1 --tol 1e-4 --max-epochs 10000 --seed 1
//   lif generate    --workspace ws --max-off 30 --appearances 20 --mode half-normal
//   lif toy embed   --workspace ws --latents ws/dataset.lidm --out ws/dataset.emb.lidm
//   lif evaluate    --embeddings ws/dataset.emb.lidm --records ws/dataset.records.jsonl --out report.json
//   lif borda       --table acc.csv
//   lif toy-e2e     --workspace ws
//
// Exit codes: 0 success, 2 validation/format error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lif/error.hpp"
#include "lif/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
namespace pl = lif::pipeline;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

fs::path or_default(const std::string& given, const fs::path& workspace, const char* fallback) {
  return given.empty() ? workspace / fallback : fs::path(given);
}

// LIF_SEED wins over --seed when set.
std::uint64_t effective_seed(std::uint64_t flag) {
  const char* env = std::getenv("LIF_SEED");
  if (env == nullptr || *env == '\0') return flag;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used, 10);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw lif::ValidationError(std::string("LIF_SEED is not an unsigned integer: ") + env);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw lif::ValidationError("bad number in list: '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identity-direction latent dataset toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();

  // toy gen / toy embed
  auto* toy = app.add_subcommand("toy", "Analytic toy world");
  toy->require_subcommand(1);
  pl::ToyGenOptions toy_gen;
  std::string toy_ws = ".";
  auto* gen = toy->add_subcommand("gen", "Write W, F and u for a toy world");
  gen->add_option("--m", toy_gen.m, "Number of reference latents")->capture_default_str();
  gen->add_option("--d", toy_gen.toy.d, "Latent dimension")->capture_default_str();
  gen->add_option("--alpha", toy_gen.toy.alpha, "Identity gain")->capture_default_str();
  gen->add_option("--beta", toy_gen.toy.beta, "Residual gain")->capture_default_str();
  gen->add_option("--seed", toy_gen.toy.seed, "Master seed")->capture_default_str();
  gen->add_option("--workspace", toy_ws, "Output directory")->capture_default_str();

  std::string embed_ws = ".";
  std::string embed_in;
  std::string embed_out;
  auto* embed = toy->add_subcommand("embed", "Embed a latent matrix with the workspace's toy world");
  embed->add_option("--workspace", embed_ws, "Workspace holding toy.manifest.json")->capture_default_str();
  embed->add_option("--latents", embed_in, "Latent LIDM file")->required();
  embed->add_option("--out", embed_out, "Output embedding LIDM file")->required();

  // label
  std::string label_ws = ".";
  std::string label_w;
  std::string label_f;
  bool label_csv = false;
  auto* lab = app.add_subcommand("label", "Cosine similarities and median-threshold labels");
  lab->add_option("--workspace", label_ws, "Output directory")->capture_default_str();
  lab->add_option("--latents", label_w, "W file (default <workspace>/W.lidm)");
  lab->add_option("--embeddings", label_f, "F file (default <workspace>/F.lidm)");
  lab->add_flag("--csv", label_csv, "Also write labels.csv (i,j,score,label)");

  // boundaries
  std::string bnd_ws = ".";
  std::string bnd_w;
  std::string bnd_labels;
  lif::SvmConfig svm;
  bool no_bias = false;
  bool no_shrinking = false;
  auto* bnd = app.add_subcommand("boundaries", "Train one linear SVM per reference");
  bnd->add_option("--workspace", bnd_ws, "Output directory")->capture_default_str();
  bnd->add_option("--latents", bnd_w, "W file (default <workspace>/W.lidm)");
  bnd->add_option("--labels", bnd_labels, "Labels file (default <workspace>/labels.lidm)");
  bnd->add_option("--c", svm.c, "Soft-margin penalty C")->capture_default_str();
  bnd->add_option("--tol", svm.tolerance, "Projected-gradient tolerance")->capture_default_str();
  bnd->add_option("--max-epochs", svm.max_epochs, "Epoch cap")->capture_default_str();
  bnd->add_option("--seed", svm.seed, "Master seed")->capture_default_str();
  bnd->add_flag("--no-bias", no_bias, "Train without the constant bias feature");
  bnd->add_flag("--no-shrinking", no_shrinking, "Disable active-set shrinking");

  // generate
  std::string gen_ws = ".";
  std::string gen_w;
  std::string gen_b;
  std::string gen_prefix = "dataset";
  std::string gen_mode = "half-normal";
  lif::SamplingConfig sampling;
  auto* generate = app.add_subcommand("generate", "Sample both sides of every boundary");
  generate->add_option("--workspace", gen_ws, "Output directory")->capture_default_str();
  generate->add_option("--latents", gen_w, "W file (default <workspace>/W.lidm)");
  generate->add_option("--boundaries", gen_b, "Boundaries file (default <workspace>/boundaries.lidm)");
  generate->add_option("--max-off", sampling.max_off, "Offset standard deviation")->capture_default_str();
  generate->add_option("--appearances", sampling.appearances, "Samples per side per reference")->capture_default_str();
  generate->add_option("--mode", gen_mode, "half-normal | literal-gaussian | sign-corrected")->capture_default_str();
  generate->add_option("--seed", sampling.seed, "Master seed")->capture_default_str();
  generate->add_option("--prefix", gen_prefix, "Output file prefix")->capture_default_str();

  // evaluate
  std::string ev_e;
  std::string ev_r;
  std::string ev_protocol = "all-pairs";
  std::string ev_classes = "both";
  std::string ev_ref;
  std::string ev_det;
  std::string ev_out = "report.json";
  std::size_t ev_max_refs = 0;
  auto* ev = app.add_subcommand("evaluate", "Verification metrics over generated identities");
  ev->add_option("--embeddings", ev_e, "Embeddings of the generated rows")->required();
  ev->add_option("--records", ev_r, "Records JSONL from generate")->required();
  ev->add_option("--protocol", ev_protocol, "all-pairs | per-reference-1toN")->capture_default_str();
  ev->add_option("--classes", ev_classes, "pos | neg | both")->capture_default_str();
  ev->add_option("--max-refs", ev_max_refs, "Evaluate only the first N references (0 = all)")->capture_default_str();
  ev->add_option("--reference-embeddings", ev_ref, "F file; adds the 1:N summary");
  ev->add_option("--det-csv", ev_det, "Write (threshold,fmr,fnmr) here");
  ev->add_option("--out", ev_out, "Report JSON")->capture_default_str();

  // borda
  std::string borda_table;
  std::string borda_out;
  auto* bc = app.add_subcommand("borda", "Borda count over a models x benchmarks accuracy table");
  bc->add_option("--table", borda_table, "LIDM or CSV table")->required();
  bc->add_option("--out", borda_out, "Optional JSON output");

  // toy-e2e
  pl::ToyE2eOptions e2e;
  std::string e2e_ws = "toy_e2e";
  std::string e2e_list = "10,20,30,40";
  std::string e2e_mode = "half-normal";
  auto* te = app.add_subcommand("toy-e2e", "Run every stage on the toy world");
  te->add_option("--workspace", e2e_ws, "Output directory")->capture_default_str();
  te->add_option("--m", e2e.m, "References")->capture_default_str();
  te->add_option("--d", e2e.toy.d, "Latent dimension")->capture_default_str();
  te->add_option("--alpha", e2e.toy.alpha, "Identity gain")->capture_default_str();
  te->add_option("--beta", e2e.toy.beta, "Residual gain")->capture_default_str();
  te->add_option("--max-off-list", e2e_list, "Comma-separated max-off values")->capture_default_str();
  te->add_option("--appearances", e2e.appearances, "Samples per side per reference")->capture_default_str();
  te->add_option("--eval-refs", e2e.eval_refs, "References used for verification metrics")->capture_default_str();
  te->add_option("--mode", e2e_mode, "Sampling mode")->capture_default_str();
  te->add_option("--c", e2e.svm.c, "SVM C")->capture_default_str();
  te->add_option("--seed", e2e.seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) {
      toy_gen.toy.seed = effective_seed(toy_gen.toy.seed);
      toy_gen.workspace = toy_ws;
      pl::toy_gen(toy_gen);
    } else if (*embed) {
      pl::toy_embed(embed_ws, embed_in, embed_out, jobs);
    } else if (*lab) {
      const fs::path ws = label_ws;
      const auto res = pl::label({or_default(label_w, ws, pl::kLatentsFile), or_default(label_f, ws, pl::kEmbeddingsFile),
                                  ws, label_csv, jobs});
      if (!res.degenerate.empty()) {
        std::cerr << "warning: " << res.degenerate.size()
                  << " reference(s) have all-equal similarity scores; their labels are all 0\n";
      }
    } else if (*bnd) {
      const fs::path ws = bnd_ws;
      pl::BoundaryOptions opt;
      opt.latents = or_default(bnd_w, ws, pl::kLatentsFile);
      opt.labels = or_default(bnd_labels, ws, pl::kLabelsFile);
      opt.out_dir = ws;
      opt.svm = svm;
      opt.svm.seed = effective_seed(svm.seed);
      opt.svm.include_bias = !no_bias;
      opt.svm.shrinking = !no_shrinking;
      opt.jobs = jobs;
      const auto set = pl::boundaries(opt);
      for (const auto& f : set.failures) {
        std::cerr << "warning: reference " << f.reference << ": " << f.reason << '\n';
      }
    } else if (*generate) {
      const fs::path ws = gen_ws;
      pl::GenerateOptions opt;
      opt.latents = or_default(gen_w, ws, pl::kLatentsFile);
      opt.boundaries = or_default(gen_b, ws, pl::kBoundariesFile);
      opt.out_dir = ws;
      opt.prefix = gen_prefix;
      opt.sampling = sampling;
      opt.sampling.mode = lif::parse_sampling_mode(gen_mode);
      opt.sampling.seed = effective_seed(sampling.seed);
      opt.jobs = jobs;
      pl::generate(opt);
    } else if (*ev) {
      pl::EvaluateOptions opt;
      opt.embeddings = ev_e;
      opt.records = ev_r;
      opt.protocol = lif::parse_protocol(ev_protocol);
      opt.classes = pl::parse_class_filter(ev_classes);
      opt.max_refs = ev_max_refs;
      if (!ev_ref.empty()) opt.reference_embeddings = ev_ref;
      if (!ev_det.empty()) opt.det_csv = ev_det;
      opt.out = ev_out;
      const auto report = pl::evaluate(opt);
      if (report.at("n_impostor").get<std::size_t>() < 100) {
        std::cerr << "warning: fewer than 100 impostor scores; fmr100 is coarse\n";
      }
      std::cout << report.dump(2) << '\n';
    } else if (*bc) {
      std::cout << pl::borda(borda_table, borda_out).dump(2) << '\n';
    } else if (*te) {
      e2e.workspace = e2e_ws;
      e2e.seed = effective_seed(e2e.seed);
      e2e.max_offs = parse_list(e2e_list);
      e2e.mode = lif::parse_sampling_mode(e2e_mode);
      e2e.jobs = jobs;
      std::cout << pl::toy_e2e(e2e).dump(2) << '\n';
    }
  } catch (const lif::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == lif::ErrorKind::Io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "lif/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lif/error.hpp"
#include "lif/lidm_io.hpp"
#include "lif/manifest.hpp"
#include "lif/similarity.hpp"

namespace lif::pipeline {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

RealMatrix read_input(const fs::path& path, RunManifest& manifest) {
  check_input_fresh(path);
  auto mat = read_matrix(path);
  manifest.record_input(path);
  return mat;
}

void write_output(const fs::path& path, const RealMatrix& mat, RunManifest& manifest) {
  write_matrix(path, mat);
  manifest.record_output(path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

void toy_gen(const ToyGenOptions& opt) {
  ensure_dir(opt.workspace);
  const ToyWorld world(opt.toy);
  const auto w = toy_latents(opt.m, opt.toy.d, opt.toy.seed);
  const auto f = world.embed(w);
  const auto u = world.identity_direction();
  RealMatrix umat(1, u.size());
  umat.set_row(0, u);

  RunManifest man;
  man.stage = "toy";
  man.master_seed = opt.toy.seed;
  man.d = opt.toy.d;
  man.l = opt.toy.d;
  man.m = opt.m;
  man.params = {{"alpha", fmt_double(opt.toy.alpha)}, {"beta", fmt_double(opt.toy.beta)}, {"mapping", "identity"}};
  man.extra["u"] = std::vector<double>(u.begin(), u.end());
  write_output(opt.workspace / kLatentsFile, w, man);
  write_output(opt.workspace / kEmbeddingsFile, f, man);
  write_output(opt.workspace / kDirectionFile, umat, man);
  write_manifest(opt.workspace, man);
}

ToyWorld load_toy_world(const fs::path& workspace) {
  const auto man = read_manifest(manifest_path(workspace, "toy"));
  if (!man.d) throw ValidationError("toy manifest lacks d");
  ToyConfig cfg;
  cfg.d = *man.d;
  cfg.seed = man.master_seed;
  try {
    cfg.alpha = std::stod(man.params.at("alpha"));
    cfg.beta = std::stod(man.params.at("beta"));
  } catch (const std::exception&) {
    throw ValidationError("toy manifest lacks alpha/beta");
  }
  return ToyWorld(cfg);
}

void toy_embed(const fs::path& workspace, const fs::path& latents, const fs::path& out, std::size_t jobs) {
  const auto world = load_toy_world(workspace);
  RunManifest man;
  man.stage = "embed-" + out.stem().string();
  man.master_seed = world.config().seed;
  const auto w = read_input(latents, man);
  if (w.cols() != world.config().d) throw ValidationError("toy embed: latents have d=" + std::to_string(w.cols()));
  man.d = w.cols();
  man.l = world.config().d;
  write_output(out, world.embed(w, jobs), man);
  write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), man);
}

LabelResult label(const LabelOptions& opt) {
  ensure_dir(opt.out_dir);
  RunManifest man;
  man.stage = "label";
  const auto w = read_input(opt.latents, man);
  const auto f = read_input(opt.embeddings, man);
  if (w.rows() != f.rows()) {
    throw ValidationError("mismatched m: latents have " + std::to_string(w.rows()) + " rows, embeddings " +
                          std::to_string(f.rows()));
  }
  man.m = w.rows();
  man.d = w.cols();
  man.l = f.cols();
  man.validate();

  const auto sims = similarity_matrix(f, opt.jobs);
  const auto labels = label_rows(sims);
  LabelResult res;
  res.m = w.rows();
  for (const auto& row : labels) {
    if (row.degenerate()) res.degenerate.push_back(row.reference);
  }

  write_output(opt.out_dir / kSimilarityFile, scores_to_matrix(sims), man);
  write_output(opt.out_dir / kThresholdsFile, thresholds_to_matrix(sims), man);
  write_output(opt.out_dir / kLabelsFile, labels_to_matrix(labels), man);
  if (opt.csv) {
    const auto csv = opt.out_dir / "labels.csv";
    write_similarity_csv(csv, sims, labels);
    man.record_output(csv);
  }
  man.params = {{"threshold", "median"}, {"tie_rule", "score<=threshold -> 0"}};
  man.extra["degenerate_references"] = res.degenerate;
  write_manifest(opt.out_dir, man);
  return res;
}

BoundarySet boundaries(const BoundaryOptions& opt) {
  ensure_dir(opt.out_dir);
  RunManifest man;
  man.stage = "boundaries";
  man.master_seed = opt.svm.seed;
  const auto w = read_input(opt.latents, man);
  const auto labels = labels_from_matrix(read_input(opt.labels, man));
  if (labels.size() != w.rows()) {
    throw ValidationError("mismatched m: latents have " + std::to_string(w.rows()) + " rows, labels " +
                          std::to_string(labels.size()));
  }
  man.m = w.rows();
  man.d = w.cols();
  man.validate();

  auto set = train_all_boundaries(w, labels, opt.svm, opt.jobs);
  write_output(opt.out_dir / kBoundariesFile, boundaries_to_matrix(set), man);
  write_json(opt.out_dir / kBoundaryStatsFile, boundary_stats_json(set));
  man.record_output(opt.out_dir / kBoundaryStatsFile);
  man.params = {{"c", fmt_double(opt.svm.c)},
                {"tolerance", fmt_double(opt.svm.tolerance)},
                {"max_epochs", std::to_string(opt.svm.max_epochs)},
                {"bias", opt.svm.include_bias ? "augmented-constant-1" : "none"},
                {"shrinking", opt.svm.shrinking ? "on" : "off"},
                {"standardize", "off"},
                {"solver", "dual-coordinate-descent-l1-hinge"}};
  write_manifest(opt.out_dir, man);
  return set;
}

std::size_t generate(const GenerateOptions& opt) {
  opt.sampling.validate();
  ensure_dir(opt.out_dir);
  RunManifest man;
  man.stage = opt.prefix == "dataset" ? std::string("generate") : "generate-" + opt.prefix;
  man.master_seed = opt.sampling.seed;
  const auto w = read_input(opt.latents, man);
  const auto set = boundaries_from_matrix(read_input(opt.boundaries, man));
  man.d = w.cols();
  man.validate();

  const auto ds = generate_dataset(w, set, opt.sampling, opt.jobs);
  write_output(opt.out_dir / (opt.prefix + ".lidm"), ds.latents, man);
  const auto records = opt.out_dir / (opt.prefix + ".records.jsonl");
  write_records_jsonl(records, ds.records);
  man.record_output(records);
  man.params = {{"max_off", fmt_double(opt.sampling.max_off)},
                {"max_off_meaning", "stddev"},
                {"appearances", std::to_string(opt.sampling.appearances)},
                {"mode", std::string(to_string(opt.sampling.mode))},
                {"references", std::to_string(w.rows())}};
  man.extra["skipped_references"] = set.failures.size();
  write_manifest(opt.out_dir, man);
  return ds.latents.rows();
}

ClassFilter parse_class_filter(const std::string& text) {
  if (text == "pos" || text == "positive") return ClassFilter::Positive;
  if (text == "neg" || text == "negative") return ClassFilter::Negative;
  if (text == "both") return ClassFilter::Both;
  throw ValidationError("unknown class filter: " + text);
}

std::string to_string(ClassFilter c) {
  switch (c) {
    case ClassFilter::Positive:
      return "pos";
    case ClassFilter::Negative:
      return "neg";
    case ClassFilter::Both:
      return "both";
  }
  return "both";
}

std::size_t identity_of(const SampleRecord& r) noexcept {
  return 2 * r.reference + (r.side == Side::Negative ? 1 : 0);
}

SideSeparation side_separation(const RealMatrix& embeddings, const std::vector<SampleRecord>& records) {
  if (records.size() != embeddings.rows()) throw ValidationError("records do not align with embeddings");
  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_ref;
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto& slot = by_ref[records[r].reference];
    (records[r].side == Side::Positive ? slot.first : slot.second).push_back(r);
  }
  SideSeparation out;
  out.min_margin = std::numeric_limits<double>::infinity();
  double within_total = 0.0;
  double cross_total = 0.0;
  for (const auto& [ref, sides] : by_ref) {
    const auto& [pos, neg] = sides;
    if (pos.size() < 2 || neg.size() < 2) continue;
    double within = 0.0;
    std::size_t n_within = 0;
    for (const auto* group : {&pos, &neg}) {
      for (std::size_t a = 0; a < group->size(); ++a) {
        for (std::size_t b = a + 1; b < group->size(); ++b) {
          within += cosine_similarity(embeddings.row((*group)[a]), embeddings.row((*group)[b]));
          ++n_within;
        }
      }
    }
    double cross = 0.0;
    for (auto p : pos) {
      for (auto q : neg) cross += cosine_similarity(embeddings.row(p), embeddings.row(q));
    }
    within /= static_cast<double>(n_within);
    cross /= static_cast<double>(pos.size() * neg.size());
    ++out.references;
    if (!(cross < within)) ++out.violations;
    out.min_margin = std::min(out.min_margin, within - cross);
    within_total += within;
    cross_total += cross;
  }
  if (out.references == 0) throw ValidationError("side_separation: no reference has two samples per side");
  out.mean_within = within_total / static_cast<double>(out.references);
  out.mean_cross = cross_total / static_cast<double>(out.references);
  return out;
}

nlohmann::json evaluate(const EvaluateOptions& opt) {
  RunManifest man;
  man.stage = "evaluate-" + opt.out.stem().string();
  const auto e = read_input(opt.embeddings, man);
  check_input_fresh(opt.records);
  const auto records = read_records_jsonl(opt.records);
  man.record_input(opt.records);
  if (records.size() != e.rows()) {
    throw ValidationError("records (" + std::to_string(records.size()) + ") do not align with embeddings (" +
                          std::to_string(e.rows()) + ")");
  }

  // Reference selection: the first max_refs distinct references in record order.
  std::set<std::size_t> chosen;
  std::vector<std::size_t> ref_order;
  for (const auto& r : records) {
    if (!chosen.contains(r.reference) && (opt.max_refs == 0 || chosen.size() < opt.max_refs)) {
      chosen.insert(r.reference);
      ref_order.push_back(r.reference);
    }
  }
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!chosen.contains(r.reference)) continue;
    if (opt.classes == ClassFilter::Positive && r.side != Side::Positive) continue;
    if (opt.classes == ClassFilter::Negative && r.side != Side::Negative) continue;
    rows.push_back(k);
  }
  RealMatrix sub(rows.size(), e.cols());
  std::vector<std::size_t> ids(rows.size());
  std::vector<SampleRecord> sub_records(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::copy(e.row(rows[k]).begin(), e.row(rows[k]).end(), sub.row(k).begin());
    ids[k] = identity_of(records[rows[k]]);
    sub_records[k] = records[rows[k]];
  }

  const auto scores = build_scores(sub, ids, opt.protocol);
  const auto report = verify(scores);
  auto j = report.to_json();
  j["protocol"] = std::string(to_string(opt.protocol));
  j["classes"] = to_string(opt.classes);
  j["references"] = ref_order.size();
  j["identities"] = std::set<std::size_t>(ids.begin(), ids.end()).size();

  if (opt.classes == ClassFilter::Both) {
    const auto sep = side_separation(sub, sub_records);
    j["side_separation"] = {{"references", sep.references}, {"violations", sep.violations},
                            {"min_margin", sep.min_margin}, {"mean_within", sep.mean_within},
                            {"mean_cross", sep.mean_cross}};
  }

  if (opt.reference_embeddings) {
    const auto f = read_input(*opt.reference_embeddings, man);
    if (f.cols() != e.cols()) throw ValidationError("reference embeddings differ in dimension");
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    std::size_t pos_n = 0;
    std::size_t neg_n = 0;
    for (std::size_t k = 0; k < sub.rows(); ++k) {
      const auto ref = sub_records[k].reference;
      if (ref >= f.rows()) throw ValidationError("record references row " + std::to_string(ref) + " beyond reference embeddings");
      const double c = cosine_similarity(f.row(ref), sub.row(k));
      if (sub_records[k].side == Side::Positive) {
        pos_sum += c;
        ++pos_n;
      } else {
        neg_sum += c;
        ++neg_n;
      }
    }
    auto& one = j["one_to_n"] = nlohmann::json::object();
    one["pos_mean"] = pos_n ? nlohmann::json(pos_sum / static_cast<double>(pos_n)) : nlohmann::json(nullptr);
    one["neg_mean"] = neg_n ? nlohmann::json(neg_sum / static_cast<double>(neg_n)) : nlohmann::json(nullptr);
  }

  if (opt.det_csv) {
    write_det_csv(*opt.det_csv, det_curve(scores));
    man.record_output(*opt.det_csv);
  }
  write_json(opt.out, j);
  man.record_output(opt.out);
  man.params = {{"protocol", std::string(to_string(opt.protocol))},
                {"classes", to_string(opt.classes)},
                {"max_refs", std::to_string(opt.max_refs)}};
  write_manifest(opt.out.has_parent_path() ? opt.out.parent_path() : fs::path("."), man);
  return j;
}

namespace {

RealMatrix read_table(const fs::path& path) {
  if (path.extension() != ".csv") return read_matrix(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        data.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw ValidationError(path.string() + ": not a number: '" + cell + "'");
      }
      ++count;
    }
    if (rows == 0) cols = count;
    else if (count != cols) throw ValidationError(path.string() + ": ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0 || cols == 0) throw ValidationError(path.string() + ": empty table");
  for (float v : data) {
    if (!std::isfinite(v)) throw ValidationError(path.string() + ": non-finite accuracy");
  }
  return RealMatrix(rows, cols, std::move(data));
}

}  // namespace

nlohmann::json borda(const fs::path& table, const fs::path& out) {
  const auto acc = read_table(table);
  nlohmann::json j;
  j["models"] = acc.rows();
  j["benchmarks"] = acc.cols();
  j["scores"] = borda_count(acc);
  if (!out.empty()) write_json(out, j);
  return j;
}

nlohmann::json toy_e2e(const ToyE2eOptions& opt) {
  if (opt.max_offs.empty()) throw ValidationError("toy-e2e: empty max-off list");
  const auto& ws = opt.workspace;
  ensure_dir(ws);

  ToyGenOptions gen;
  gen.m = opt.m;
  gen.toy = opt.toy;
  gen.toy.seed = opt.seed;
  gen.workspace = ws;
  toy_gen(gen);

  const auto lab = label({ws / kLatentsFile, ws / kEmbeddingsFile, ws, false, opt.jobs});

  BoundaryOptions bo;
  bo.latents = ws / kLatentsFile;
  bo.labels = ws / kLabelsFile;
  bo.out_dir = ws;
  bo.svm = opt.svm;
  bo.svm.seed = opt.seed;
  bo.jobs = opt.jobs;
  const auto set = boundaries(bo);

  const ToyWorld world = load_toy_world(ws);
  const auto u = world.identity_direction();
  std::size_t recovered = 0;
  std::size_t converged = 0;
  for (const auto& b : set.boundaries) {
    double c = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) c += b.normal[k] * u[k];
    if (std::abs(c) >= opt.recovery_cosine) ++recovered;
    if (b.stats.converged) ++converged;
  }

  nlohmann::json summary;
  summary["config"] = {{"m", opt.m},
                       {"d", opt.toy.d},
                       {"alpha", opt.toy.alpha},
                       {"beta", opt.toy.beta},
                       {"seed", opt.seed},
                       {"appearances", opt.appearances},
                       {"eval_refs", opt.eval_refs},
                       {"mode", std::string(to_string(opt.mode))},
                       {"svm", {{"c", opt.svm.c}, {"tolerance", opt.svm.tolerance}, {"max_epochs", opt.svm.max_epochs}}}};
  summary["labels"] = {{"degenerate_references", lab.degenerate.size()}};
  summary["recovery"] = {{"rate", static_cast<double>(recovered) / static_cast<double>(opt.m)},
                         {"recovered", recovered},
                         {"references", opt.m},
                         {"failures", set.failures.size()},
                         {"converged", converged},
                         {"min_abs_cosine", opt.recovery_cosine}};

  auto& sweep = summary["sweep"] = nlohmann::json::array();
  for (double max_off : opt.max_offs) {
    const std::string tag = "dataset_m" + fmt_double(max_off);
    GenerateOptions go;
    go.latents = ws / kLatentsFile;
    go.boundaries = ws / kBoundariesFile;
    go.out_dir = ws;
    go.prefix = tag;
    go.sampling = {max_off, opt.appearances, opt.mode, opt.seed};
    go.jobs = opt.jobs;
    generate(go);

    const auto emb = ws / (tag + ".emb.lidm");
    toy_embed(ws, ws / (tag + ".lidm"), emb, opt.jobs);

    nlohmann::json entry;
    entry["max_off"] = max_off;
    for (auto cls : {ClassFilter::Positive, ClassFilter::Negative, ClassFilter::Both}) {
      EvaluateOptions eo;
      eo.embeddings = emb;
      eo.records = ws / (tag + ".records.jsonl");
      eo.classes = cls;
      eo.max_refs = opt.eval_refs;
      if (cls == ClassFilter::Both) eo.reference_embeddings = ws / kEmbeddingsFile;
      eo.out = ws / ("report_m" + fmt_double(max_off) + "_" + to_string(cls) + ".json");
      entry[to_string(cls)] = evaluate(eo);
    }
    sweep.push_back(std::move(entry));
  }

  write_json(ws / "summary.json", summary);
  return summary;
}

}  // namespace lif::pipeline

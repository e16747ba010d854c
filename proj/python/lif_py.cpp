#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "lif/error.hpp"
#include "lif/lidm_io.hpp"
#include "lif/metrics.hpp"
#include "lif/pipeline.hpp"
#include "lif/sampler.hpp"
#include "lif/similarity.hpp"
#include "lif/svm.hpp"
#include "lif/toy_world.hpp"

namespace py = pybind11;
using namespace lif;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RealMatrix to_matrix(const FloatArray& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-D array");
  RealMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::memcpy(m.data().data(), a.data(), m.size() * sizeof(float));
  return m;
}

FloatArray to_array(const RealMatrix& m) {
  FloatArray a({m.rows(), m.cols()});
  std::memcpy(a.mutable_data(), m.data().data(), m.size() * sizeof(float));
  return a;
}

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw ValidationError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

ScoreSet score_set(const DoubleArray& genuine, const DoubleArray& impostor) {
  ScoreSet s{to_vector(genuine), to_vector(impostor)};
  s.validate();
  return s;
}

BoundarySet boundary_set(const FloatArray& boundaries) { return boundaries_from_matrix(to_matrix(boundaries)); }

}  // namespace

PYBIND11_MODULE(_lif, mod) {
  mod.doc() = "Identity-direction latent sampling and verification metrics";

  static py::exception<ValidationError> validation_error(mod, "ValidationError", PyExc_ValueError);
  static py::exception<FormatError> format_error(mod, "FormatError", PyExc_ValueError);
  static py::exception<IoError> io_error(mod, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const FormatError& e) {
      py::set_error(format_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    }
  });

  mod.def("read_matrix", [](const std::filesystem::path& p) { return to_array(read_matrix(p)); }, py::arg("path"));
  mod.def("write_matrix", [](const std::filesystem::path& p, const FloatArray& a) { write_matrix(p, to_matrix(a)); },
          py::arg("path"), py::arg("matrix"));

  mod.def(
      "cosine_similarity",
      [](const DoubleArray& a, const DoubleArray& b) { return cosine_similarity(to_vector(a), to_vector(b)); },
      py::arg("a"), py::arg("b"));

  mod.def(
      "label_identities",
      [](const FloatArray& embeddings, std::size_t jobs) {
        const auto sims = similarity_matrix(to_matrix(embeddings), jobs);
        const auto labels = label_rows(sims);
        return py::make_tuple(to_array(scores_to_matrix(sims)), to_array(thresholds_to_matrix(sims)),
                              to_array(labels_to_matrix(labels)));
      },
      py::arg("embeddings"), py::arg("jobs") = 1,
      "Returns (similarity, thresholds, labels), each an m-row float32 array.");

  mod.def(
      "train_linear_svm",
      [](const FloatArray& x, const LabelArray& y, double c, double tolerance, bool include_bias,
         std::uint64_t seed) {
        SvmConfig cfg;
        cfg.c = c;
        cfg.tolerance = tolerance;
        cfg.include_bias = include_bias;
        cfg.seed = seed;
        const std::span<const std::uint8_t> labels(y.data(), static_cast<std::size_t>(y.size()));
        const auto sol = train_linear_svm(to_matrix(x), labels, cfg);
        py::dict out;
        out["weights"] = py::array_t<double>(sol.weights.size(), sol.weights.data());
        out["bias"] = sol.bias;
        out["epochs"] = sol.stats.epochs;
        out["primal"] = sol.stats.primal_objective;
        out["dual"] = sol.stats.dual_objective;
        out["converged"] = sol.stats.converged;
        return out;
      },
      py::arg("x"), py::arg("labels"), py::arg("c") = 1.0, py::arg("tolerance") = 1e-4, py::arg("include_bias") = true,
      py::arg("seed") = 0);

  mod.def(
      "train_boundaries",
      [](const FloatArray& latents, const FloatArray& labels, double c, std::uint64_t seed, std::size_t jobs) {
        SvmConfig cfg;
        cfg.c = c;
        cfg.seed = seed;
        const auto set = train_all_boundaries(to_matrix(latents), labels_from_matrix(to_matrix(labels)), cfg, jobs);
        return to_array(boundaries_to_matrix(set));
      },
      py::arg("latents"), py::arg("labels"), py::arg("c") = 1.0, py::arg("seed") = 0, py::arg("jobs") = 1,
      "Returns an m x (d+1) array of [unit normal, intercept]; failed references are zero rows.");

  mod.def(
      "generate_dataset",
      [](const FloatArray& latents, const FloatArray& boundaries, double max_off, std::size_t appearances,
         const std::string& mode, std::uint64_t seed, std::size_t jobs) {
        SamplingConfig cfg{max_off, appearances, parse_sampling_mode(mode), seed};
        const auto ds = generate_dataset(to_matrix(latents), boundary_set(boundaries), cfg, jobs);
        py::list records;
        for (const auto& r : ds.records) {
          records.append(py::dict(py::arg("ref") = r.reference, py::arg("side") = std::string(to_string(r.side)),
                                  py::arg("app") = r.appearance, py::arg("seed") = r.seed));
        }
        return py::make_tuple(to_array(ds.latents), records);
      },
      py::arg("latents"), py::arg("boundaries"), py::arg("max_off") = 10.0, py::arg("appearances") = 1,
      py::arg("mode") = "half-normal", py::arg("seed") = 0, py::arg("jobs") = 1);

  mod.def("eer", [](const DoubleArray& g, const DoubleArray& i) { return eer(score_set(g, i)).eer; },
          py::arg("genuine"), py::arg("impostor"));
  mod.def("fmr100", [](const DoubleArray& g, const DoubleArray& i) { return fmr100(score_set(g, i)); },
          py::arg("genuine"), py::arg("impostor"));
  mod.def("fdr", [](const DoubleArray& g, const DoubleArray& i) { return fdr(score_set(g, i)); }, py::arg("genuine"),
          py::arg("impostor"));
  mod.def(
      "verify",
      [](const FloatArray& embeddings, const std::vector<std::size_t>& identities, const std::string& protocol) {
        const auto r = verify(build_scores(to_matrix(embeddings), identities, parse_protocol(protocol)));
        return py::module_::import("json").attr("loads")(r.to_json().dump());
      },
      py::arg("embeddings"), py::arg("identities"), py::arg("protocol") = "all-pairs");
  mod.def("borda_count", [](const FloatArray& acc) { return borda_count(to_matrix(acc)); }, py::arg("accuracies"));

  mod.def("toy_latents", [](std::size_t m, std::size_t d, std::uint64_t seed) { return to_array(toy_latents(m, d, seed)); },
          py::arg("m"), py::arg("d") = 16, py::arg("seed") = 0);
  mod.def(
      "toy_embed",
      [](const FloatArray& latents, double alpha, double beta, std::uint64_t seed, std::size_t jobs) {
        const auto m = to_matrix(latents);
        const ToyWorld world(ToyConfig{m.cols(), alpha, beta, seed});
        return to_array(world.embed(m, jobs));
      },
      py::arg("latents"), py::arg("alpha") = 5.0, py::arg("beta") = 0.2, py::arg("seed") = 0, py::arg("jobs") = 1);
  mod.def(
      "toy_direction",
      [](std::size_t d, double alpha, double beta, std::uint64_t seed) {
        const ToyWorld world(ToyConfig{d, alpha, beta, seed});
        const auto u = world.identity_direction();
        return py::array_t<double>(u.size(), u.data());
      },
      py::arg("d") = 16, py::arg("alpha") = 5.0, py::arg("beta") = 0.2, py::arg("seed") = 0);
}

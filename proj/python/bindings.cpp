#include "rhcsf/baselines.hpp"
#include "rhcsf/criterion.hpp"
#include "rhcsf/designer.hpp"
#include "rhcsf/harness.hpp"
#include "rhcsf/metrics.hpp"
#include "rhcsf/process.hpp"
#include "rhcsf/sampling.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rhcsf;

namespace {

InitialState init_from(const Vector& x0) { return InitialState{x0}; }

Region region_from(const Vector& lower, const Vector& upper) { return Region(lower, upper); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Receding-horizon space-filling excitation design (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DesignerError>(m, "DesignerError", PyExc_RuntimeError);
  py::register_exception<SimulationDiverged>(m, "SimulationDiverged", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);

  m.def("sobol", &sobol, py::arg("dim"), py::arg("n"), "First n points of the Sobol sequence in [0,1)^dim.");
  m.def(
      "supporting_set",
      [](const Vector& lower, const Vector& upper, Eigen::Index n) {
        return supporting_set(region_from(lower, upper), n).points;
      },
      py::arg("lower"), py::arg("upper"), py::arg("n"));

  m.def(
      "build_regressors",
      [](const Matrix& inputs, const Matrix& outputs, const Vector& x0, int order, double sample_time) {
        const NarxConfig cfg{static_cast<int>(inputs.cols()), static_cast<int>(outputs.cols()), order, sample_time};
        return build_regressors(cfg, Dataset{inputs, outputs, Origin::measured}, init_from(x0));
      },
      py::arg("inputs"), py::arg("outputs"), py::arg("x0"), py::arg("order") = 1, py::arg("sample_time") = 1.0);
  m.def(
      "regressor_space",
      [](const Matrix& inputs, const Matrix& outputs, const Vector& x0, int order, double sample_time) {
        const NarxConfig cfg{static_cast<int>(inputs.cols()), static_cast<int>(outputs.cols()), order, sample_time};
        return regressor_space(cfg, Dataset{inputs, outputs, Origin::measured}, init_from(x0));
      },
      py::arg("inputs"), py::arg("outputs"), py::arg("x0"), py::arg("order") = 1, py::arg("sample_time") = 1.0);

  m.def(
      "simulate",
      [](const std::string& plant, const Matrix& inputs, const Vector& x0, double sample_time) {
        return simulate(make_plant(plant, sample_time), inputs, init_from(x0)).outputs;
      },
      py::arg("plant"), py::arg("inputs"), py::arg("x0"), py::arg("sample_time") = 1.0);

  m.def("criterion_value", py::overload_cast<const Matrix&, const Matrix&>(&criterion_value), py::arg("regressors"),
        py::arg("psi"));
  m.def("largest_ball_radius",
        [](const Matrix& design, const Matrix& eval) { return largest_ball_radius(design, EvaluationSet{eval}); },
        py::arg("design"), py::arg("eval_points"));
  m.def("radius_progress",
        [](const Matrix& design, const Matrix& eval) { return radius_progress(design, EvaluationSet{eval}); },
        py::arg("design"), py::arg("eval_points"));
  m.def(
      "jsd_to_uniform",
      [](const Matrix& design, const Vector& lower, const Vector& upper, int bins) {
        return jsd_to_uniform(design, region_from(lower, upper), bins);
      },
      py::arg("design"), py::arg("lower"), py::arg("upper"), py::arg("bins_per_axis") = kDefaultBinsPerAxis);
  m.def("jensen_shannon", &jensen_shannon, py::arg("p"), py::arg("q"));

  m.def(
      "aprbs",
      [](Eigen::Index length, double min_hold_time, const Vector& lower, const Vector& upper, std::uint64_t seed,
         double sample_time) {
        return aprbs(AprbsConfig{length, min_hold_time, region_from(lower, upper), seed}, sample_time);
      },
      py::arg("length"), py::arg("min_hold_time"), py::arg("lower"), py::arg("upper"), py::arg("seed"),
      py::arg("sample_time") = 1.0);
  m.def(
      "multisine",
      [](Eigen::Index length, int n_harmonics, const Vector& lower, const Vector& upper, std::uint64_t seed) {
        return multisine(length, n_harmonics, region_from(lower, upper), seed);
      },
      py::arg("length"), py::arg("n_harmonics"), py::arg("lower"), py::arg("upper"), py::arg("seed"));

  m.def(
      "design_signal",
      [](const std::string& config_text, const std::string& method, std::uint64_t seed) {
        ExperimentConfig cfg = experiment_config_from(ConfigDocument::parse(config_text));
        cfg.base_seed = seed;
        ReplicateResult r;
        {
          py::gil_scoped_release release;
          const ExperimentContext ctx = make_context(cfg);
          r = run_replicate(ctx, parse_method(method), 0);
        }
        if (!r.ok) throw DesignerError(r.error);
        py::dict out;
        out["inputs"] = r.inputs;
        out["outputs"] = r.outputs;
        out["R"] = r.radius;
        out["JSD"] = r.jsd;
        out["R_progress"] = r.radius_progress;
        out["j_trace"] = r.j_trace;
        out["state_violations"] = r.state_violations;
        out["config_hash"] = cfg.hash();
        return out;
      },
      py::arg("config_text") = "", py::arg("method") = "proposed-fixed", py::arg("seed") = 0,
      "Design and score one signal; config_text uses the experiment config format.");

  m.def(
      "run_experiment_json",
      [](const std::string& config_text) {
        const ExperimentConfig cfg = experiment_config_from(ConfigDocument::parse(config_text));
        py::gil_scoped_release release;
        return run_experiment(cfg).to_json().dump();
      },
      py::arg("config_text"), "Run the replicate batch; returns the report as a JSON string.");

  m.def("quantiles", [](const std::vector<double>& v) {
    const Quantiles q = quantiles(v);
    return std::vector<double>{q.min, q.q1, q.median, q.q3, q.max};
  });

}

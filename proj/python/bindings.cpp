#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <wuigraph/config.hpp>
#include <wuigraph/diagnostics.hpp>
#include <wuigraph/edge_physics.hpp>
#include <wuigraph/ensemble.hpp>
#include <wuigraph/error.hpp>
#include <wuigraph/io.hpp>
#include <wuigraph/pipeline.hpp>
#include <wuigraph/synth.hpp>

#include "cli.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace wuigraph;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; Python's json module does the rest.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ScenarioConfig make_config(const py::object& config, std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg = config.is_none() ? ScenarioConfig{} : ScenarioConfig::from_json(from_py(config));
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

json stats_json(const OutcomeStats& s) {
  return {{"count", s.count}, {"degree_mean", s.degree_mean}, {"eigen_mean", s.eigen_mean}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wildfire contagion graph, dual-specialist models and diagnostics.";
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);

  m.def("wind_correlation", &wind_correlation, py::arg("edge_bearing_deg"), py::arg("wind_direction_deg"));
  m.def("flame_angle", &flame_angle, py::arg("flame_height"), py::arg("wind_speed") = 22.2,
        py::arg("gravity") = 9.81);
  m.def(
      "incident_flux",
      [](double area, double d_min, double t_flame, double t_ambient) {
        return incident_flux(area, d_min, t_flame, t_ambient, Environment{});
      },
      py::arg("target_area"), py::arg("d_min"), py::arg("t_flame"), py::arg("t_ambient"),
      "Radiant flux in kW/m^2 under the default environment.");
  m.def("total_probability", &total_probability, py::arg("p_conv"), py::arg("p_rad"), py::arg("p_ember"));

  m.def(
      "roc_auc", [](const std::vector<int>& y, const std::vector<double>& s) { return roc_auc(y, s); },
      py::arg("labels"), py::arg("scores"));
  m.def(
      "classification_metrics",
      [](const std::vector<int>& y, const std::vector<double>& s, double t) {
        return to_py(classification_metrics(y, s, t).to_json());
      },
      py::arg("labels"), py::arg("scores"), py::arg("threshold") = 0.5);
  m.def(
      "metrics_from_counts",
      [](std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
        return to_py(metrics_from_counts(tp, fp, tn, fn).to_json());
      },
      py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));

  m.def(
      "fit_stacker",
      [](const std::vector<double>& g, const std::vector<double>& x, const std::vector<int>& y) {
        const StackerFit f = fit_stacker(g, x, y);
        json j = f.coefficients.to_json();
        j["iterations"] = f.iterations;
        j["converged"] = f.converged;
        j["separation_warning"] = f.separation_warning;
        j["log_loss"] = f.log_loss;
        return to_py(j);
      },
      py::arg("p_gnn"), py::arg("p_xgb"), py::arg("labels"));
  m.def(
      "stack_predict",
      [](double b0, double b1, double b2, double g, double x) { return stack_predict({b0, b1, b2}, g, x); },
      py::arg("beta0"), py::arg("beta_gnn"), py::arg("beta_xgb"), py::arg("p_gnn"), py::arg("p_xgb"));
  m.def(
      "triage", [](double g, double x, double t) { return std::string(to_string(triage(g, x, t))); },
      py::arg("p_gnn"), py::arg("p_xgb"), py::arg("threshold") = 0.5);

  m.def(
      "synth",
      [](const fs::path& out, std::uint64_t seed, const std::string& preset, std::optional<int> n_buildings,
         std::optional<double> extent) {
        if (preset != "default" && preset != "structural_signal") {
          throw ValidationError("synth: preset must be 'default' or 'structural_signal'");
        }
        SynthConfig c = preset == "structural_signal" ? SynthConfig::structural_signal(seed) : SynthConfig{};
        c.seed = seed;
        if (n_buildings) c.n_buildings = *n_buildings;
        if (extent) c.extent = *extent;
        const SynthTruth t = generate(c, out);
        return to_py({{"bayes_auc", t.bayes_auc}, {"damage_rate", t.damage_rate}, {"damaged", t.damaged}});
      },
      py::arg("out_dir"), py::arg("seed") = 0, py::arg("preset") = "default", py::arg("n_buildings") = py::none(),
      py::arg("extent") = py::none(), "Writes a synthetic scenario directory; returns its planted truth summary.");

  m.def(
      "build_graph",
      [](const fs::path& scenario, const fs::path& out, const py::object& config, std::optional<std::uint64_t> seed,
         unsigned threads) {
        const ScenarioConfig cfg = make_config(config, seed);
        const PreparedGraph p = prepare_graph(load_scenario(scenario, cfg.catalog()), cfg, threads);
        write_json(out, graph_to_json(p.graph, cfg.hash()));
        return to_py(summary_to_json(p.summary));
      },
      py::arg("scenario_dir"), py::arg("out_path"), py::arg("config") = py::none(), py::arg("seed") = py::none(),
      py::arg("threads") = 1, "Builds the contagion graph, writes it as JSON and returns the build summary.");

  m.def(
      "centrality",
      [](const fs::path& graph_path) {
        const ContagionGraph g = graph_from_json(read_json(graph_path));
        json ids = json::array(), degree = json::array();
        for (NodeIndex i = 0; i < g.node_count(); ++i) {
          ids.push_back(g.node(i).id);
          degree.push_back(degree_centrality(g, i));
        }
        json eigen = nullptr;
        try {
          eigen = eigenvector_centrality(g).scores;
        } catch (const ComputationError&) {
          // Same policy as eval_all: report the eigenvector as unavailable.
        }
        return to_py({{"ids", ids}, {"degree", degree}, {"eigenvector", eigen}});
      },
      py::arg("graph_path"),
      "Degree and eigenvector centrality per node; eigenvector is None when power iteration stalls.");

  m.def(
      "eval_all",
      [](const fs::path& scenario, const fs::path& out, const py::object& config, std::optional<std::uint64_t> seed,
         unsigned threads) {
        const ScenarioConfig cfg = make_config(config, seed);
        const EvalSummary s = eval_all(scenario, out, cfg, threads);
        json quadrants = json::object();
        for (std::size_t k = 0; k < 4; ++k) quadrants[std::string(to_string(kAllQuadrants[k]))] = s.quadrant_counts[k];
        json outcomes = json::object();
        for (std::size_t k = 0; k < 4; ++k) {
          outcomes[std::string(to_string(static_cast<Outcome>(k)))] = stats_json(s.centrality.rows[k]);
        }
        return to_py({{"test_size", s.test_size},
                      {"gnn", s.gnn.to_json()},
                      {"gbdt", s.gbdt.to_json()},
                      {"stack", s.stack.to_json()},
                      {"stacker", s.stacker.coefficients.to_json()},
                      {"centrality", outcomes},
                      {"triage_counts", quadrants}});
      },
      py::arg("scenario_dir"), py::arg("out_dir"), py::arg("config") = py::none(), py::arg("seed") = py::none(),
      py::arg("threads") = 1, "Full pipeline; artifacts land in out_dir and a summary is returned.");

  m.def(
      "default_config", [] { return to_py(ScenarioConfig{}.to_json()); }, "Complete default configuration.");
  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "wuigraph");
        return run_cli(args);
      },
      py::arg("args"), "Runs one command line without argv[0]; returns the exit code.");
}

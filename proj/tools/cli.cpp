#include "cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "wuigraph/config.hpp"
#include "wuigraph/error.hpp"
#include "wuigraph/io.hpp"
#include "wuigraph/pipeline.hpp"
#include "wuigraph/synth.hpp"

namespace wuigraph {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string config_path;
  unsigned threads = 1;
  bool quiet = false;
};

ScenarioConfig resolve_config(const Globals& g) {
  ScenarioConfig cfg = g.config_path.empty() ? ScenarioConfig{} : load_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  cfg.validate();
  return cfg;
}

ContagionGraph read_graph(const std::string& path, const ScenarioConfig& cfg) {
  std::string stored;
  ContagionGraph g = graph_from_json(read_json(path), &stored);
  if (stored != cfg.hash()) {
    warn(path + ": graph was built with config " + stored + ", current config is " + cfg.hash());
  }
  return g;
}

std::vector<NodeIndex> select_nodes(const ContagionGraph& g, const std::string& subset) {
  if (subset == "all") return g.building_indices();
  if (subset == "train") return g.masks().train;
  if (subset == "val") return g.masks().val;
  if (subset == "test") return g.masks().test;
  throw ValidationError("--subset must be one of all, train, val, test");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Wildfire contagion graph and damage-prediction ensemble"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (overrides the config)")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--config", g.config_path, "ScenarioConfig JSON")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads for graph building")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Silence warnings");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic scenario directory");
  std::string synth_out, preset = "default";
  int n_buildings = 0;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--preset", preset, "default or structural_signal")
      ->check(CLI::IsMember({"default", "structural_signal"}));
  synth->add_option("--n-buildings", n_buildings, "Number of buildings");

  // build-graph
  auto* build = app.add_subcommand("build-graph", "Build the contagion graph from a scenario");
  std::string scenario_dir, graph_out, summary_out;
  build->add_option("--scenario", scenario_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", graph_out, "Graph JSON")->required();
  build->add_option("--summary", summary_out, "Build summary JSON");

  // train-gnn
  auto* tgnn = app.add_subcommand("train-gnn", "Train the graph attention specialist");
  std::string graph_in, gnn_out, history_out;
  tgnn->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  tgnn->add_option("--out", gnn_out, "GAT parameters JSON")->required();
  tgnn->add_option("--history", history_out, "Per-epoch loss JSON");

  // train-gbdt
  auto* tgbdt = app.add_subcommand("train-gbdt", "Train the boosted-tree structural specialist");
  std::string gbdt_out;
  tgbdt->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  tgbdt->add_option("--out", gbdt_out, "Forest JSON")->required();

  // stack
  auto* stack = app.add_subcommand("stack", "Fit the stacker on validation predictions");
  std::string gnn_in, gbdt_in, bundle_out;
  stack->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  stack->add_option("--gnn", gnn_in, "GAT parameters JSON")->required()->check(CLI::ExistingFile);
  stack->add_option("--gbdt", gbdt_in, "Forest JSON")->required()->check(CLI::ExistingFile);
  stack->add_option("--out", bundle_out, "Model bundle JSON")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "Per-building probabilities");
  std::string bundle_in, pred_out, subset = "all";
  pred->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  pred->add_option("--bundle", bundle_in, "Model bundle JSON")->required()->check(CLI::ExistingFile);
  pred->add_option("--out", pred_out, "Predictions CSV")->required();
  pred->add_option("--subset", subset, "all, train, val or test");

  // triage
  auto* tri = app.add_subcommand("triage", "Mitigation triage layers");
  std::string tri_csv, tri_geojson;
  tri->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  tri->add_option("--bundle", bundle_in, "Model bundle JSON")->required()->check(CLI::ExistingFile);
  tri->add_option("--out-csv", tri_csv, "Triage CSV")->required();
  tri->add_option("--out-geojson", tri_geojson, "Triage GeoJSON");
  tri->add_option("--subset", subset, "all, train, val or test");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Metrics and centrality report on the test split");
  std::string diag_out;
  diag->add_option("--graph", graph_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  diag->add_option("--bundle", bundle_in, "Model bundle JSON")->required()->check(CLI::ExistingFile);
  diag->add_option("--out", diag_out, "Output directory")->required();

  // eval-all
  auto* eval = app.add_subcommand("eval-all", "Full pipeline from a scenario directory");
  std::string eval_out;
  eval->add_option("--scenario", scenario_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", eval_out, "Output directory")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_warnings_silenced(g.quiet);
    if (synth->parsed()) {
      SynthConfig sc = preset == "structural_signal" ? SynthConfig::structural_signal() : SynthConfig{};
      sc.seed = g.seed;
      if (n_buildings > 0) sc.n_buildings = n_buildings;
      const SynthTruth t = generate(sc, synth_out, g.threads);
      std::cout << "wrote " << sc.n_buildings << " buildings to " << synth_out << " (damage rate "
                << t.damage_rate << ", planted AUC " << t.bayes_auc << ")\n";
      return 0;
    }
    const ScenarioConfig cfg = resolve_config(g);
    if (build->parsed()) {
      const Scenario s = load_scenario(scenario_dir, cfg.catalog());
      const PreparedGraph p = prepare_graph(s, cfg, g.threads);
      write_json(graph_out, graph_to_json(p.graph, cfg.hash()));
      const json summary = summary_to_json(p.summary);
      if (!summary_out.empty()) write_json(summary_out, summary);
      std::cout << summary.dump() << "\n";
      std::cout << "all retained edges >= " << cfg.graph.prune_threshold << ": "
                << (p.summary.retained_edges == 0 || p.summary.min_retained_weight >= cfg.graph.prune_threshold
                        ? "yes"
                        : "no")
                << "\n";
      return 0;
    }
    if (tgnn->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      const TrainResult r = train_gnn(graph, cfg);
      write_json(gnn_out, r.params.to_json());
      if (!history_out.empty()) {
        json rows = json::array();
        for (const auto& e : r.history) rows.push_back({e.epoch, e.train_loss, e.val_loss, e.lr});
        write_json(history_out, {{"fields", {"epoch", "train_loss", "val_loss", "lr"}}, {"rows", rows}});
      }
      std::cout << "trained " << r.history.size() << " epochs, best epoch " << r.best_epoch << "\n";
      return 0;
    }
    if (tgbdt->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      const Forest f = train_gbdt(graph, cfg);
      write_json(gbdt_out, f.to_json());
      std::cout << "trained " << f.trees.size() << " trees\n";
      return 0;
    }
    if (stack->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      ModelBundle b;
      b.gat = GatParams::from_json(read_json(gnn_in));
      b.forest = Forest::from_json(read_json(gbdt_in));
      const StackerFit fitres = fit_stacker_on_validation(graph, b.gat, b.forest);
      if (fitres.separation_warning) warn("stack: validation predictions look perfectly separated");
      b.stacker = fitres.coefficients;
      b.config_hash = cfg.hash();
      write_json(bundle_out, b.to_json());
      std::cout << b.stacker.to_json().dump() << "\n";
      return 0;
    }
    const auto load_bundle = [&] { return ModelBundle::from_json(read_json(bundle_in), cfg.hash()); };
    if (pred->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      const Predictions p = predict(graph, load_bundle(), select_nodes(graph, subset));
      write_text(pred_out, predictions_csv(graph, p));
      return 0;
    }
    if (tri->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      const Predictions p = predict(graph, load_bundle(), select_nodes(graph, subset));
      const auto records = triage_records(graph, p, cfg.stacker.decision_threshold);
      write_text(tri_csv, triage_csv(records));
      if (!tri_geojson.empty()) write_json(tri_geojson, triage_geojson(records));
      return 0;
    }
    if (diag->parsed()) {
      const ContagionGraph graph = read_graph(graph_in, cfg);
      const auto& test = graph.masks().test;
      if (test.empty()) throw ValidationError(graph_in + ": graph has no test mask");
      const Predictions p = predict(graph, load_bundle(), test);
      const auto labels = labels_of(graph, test);
      const double t = cfg.stacker.decision_threshold;
      const auto m_gnn = classification_metrics(labels, p.p_gnn, t);
      const auto m_gbdt = classification_metrics(labels, p.p_xgb, t);
      const auto m_stack = classification_metrics(labels, p.p_stack, t);
      write_json(fs::path(diag_out) / "metrics.json",
                 {{"gnn", m_gnn.to_json()}, {"gbdt", m_gbdt.to_json()}, {"stack", m_stack.to_json()}});
      write_json(fs::path(diag_out) / "centrality.json",
                 outcome_centrality_report(graph, test, p.p_gnn).to_json());
      write_text(fs::path(diag_out) / "confusion_stack.csv", confusion_csv(m_stack));
      return 0;
    }
    if (eval->parsed()) {
      const EvalSummary s = eval_all(scenario_dir, eval_out, cfg, g.threads);
      std::cout << "test AUC gnn " << (s.gnn.roc_auc ? *s.gnn.roc_auc : 0.0) << ", gbdt "
                << (s.gbdt.roc_auc ? *s.gbdt.roc_auc : 0.0) << ", stack "
                << (s.stack.roc_auc ? *s.stack.roc_auc : 0.0) << "; artifacts in " << eval_out << "\n";
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ComputationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace wuigraph

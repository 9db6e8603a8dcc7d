#include "wuigraph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wuigraph/error.hpp"

namespace wuigraph {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t labeled_buildings(const std::vector<Node>& nodes) {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) {
    return n.is_building() && n.label.has_value();
  }));
}

json history_json(const TrainResult& r) {
  json rows = json::array();
  for (const auto& e : r.history) rows.push_back({e.epoch, e.train_loss, e.val_loss, e.lr});
  return {{"fields", {"epoch", "train_loss", "val_loss", "lr"}},
          {"rows", rows},
          {"best_epoch", r.best_epoch},
          {"early_stopped", r.early_stopped}};
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string metrics_table(const char* name, const MetricsReport& m) {
  std::ostringstream os;
  os << name << ": accuracy " << fmt(m.accuracy) << ", macro F1 " << fmt(m.macro_f1) << ", AUC "
     << (m.roc_auc ? fmt(*m.roc_auc) : std::string("n/a")) << "\n";
  os << "  survived  precision " << fmt(m.survived.precision) << "  recall " << fmt(m.survived.recall)
     << "  F1 " << fmt(m.survived.f1) << "  n " << m.survived.support << "\n";
  os << "  damaged   precision " << fmt(m.damaged.precision) << "  recall " << fmt(m.damaged.recall)
     << "  F1 " << fmt(m.damaged.f1) << "  n " << m.damaged.support << "\n";
  return os.str();
}

}  // namespace

PreparedGraph prepare_graph(const Scenario& scenario, const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  const Catalog catalog = cfg.catalog();
  const GraphSettings& gs = cfg.graph;

  std::vector<LonLat> anchors;
  anchors.reserve(scenario.buildings.size());
  for (const auto& b : scenario.buildings) anchors.push_back(b.lonlat);
  PreparedGraph out;
  out.projection = LocalProjection::centered_on(anchors);
  const LocalProjection& proj = out.projection;

  std::vector<FuelGrid::Sample> samples;
  samples.reserve(scenario.fuel.size());
  for (const auto& f : scenario.fuel) samples.push_back({proj.forward(f.lonlat), f.lonlat, f.fuel_class, f.canopy});
  const FuelGrid grid(std::move(samples), gs.vegetation_spacing);

  std::vector<GeoPoint> epts;
  std::vector<std::array<double, kEmbeddingDim>> evals;
  for (const auto& e : scenario.embeddings) {
    epts.push_back(proj.forward(e.lonlat));
    evals.push_back(e.values);
  }
  const EmbeddingField embeddings(std::move(epts), std::move(evals), gs.embedding_snap_distance);
  std::vector<GeoPoint> tpts;
  std::vector<std::array<double, 2>> tvals;
  for (const auto& t : scenario.terrain) {
    tpts.push_back(proj.forward(t.lonlat));
    tvals.push_back({t.slope, t.elevation});
  }
  const TerrainField terrain(std::move(tpts), std::move(tvals), gs.embedding_snap_distance);

  std::vector<Node> nodes = scenario.buildings;
  for (auto& b : nodes) {
    b.location = proj.forward(b.lonlat);
    attach_building_fuel(b, grid, gs);
  }
  auto vegetation = discretize_vegetation(grid, grid.extent(), gs.vegetation_spacing, catalog);
  for (auto& v : vegetation) v.lonlat = proj.inverse(v.location);
  nodes.insert(nodes.end(), std::make_move_iterator(vegetation.begin()),
               std::make_move_iterator(vegetation.end()));
  for (auto& n : nodes) assemble_features(n, embeddings, terrain, gs.embedding_snap_distance);

  const bool splittable = labeled_buildings(nodes) >= 10;
  auto [graph, summary] = build_graph(std::move(nodes), cfg.physics, catalog, gs,
                                      BuildOptions{cfg.graph_seed(), std::max(1u, threads)});
  if (summary.retained_edges > 0 && summary.min_retained_weight < gs.prune_threshold) {
    throw ComputationError("graph build retained an edge below the prune threshold");
  }
  out.summary = summary;
  out.graph = splittable ? graph.with_masks(split_dataset(graph, cfg.split, cfg.split_seed()))
                         : std::move(graph);
  return out;
}

json summary_to_json(const BuildSummary& s) {
  return {{"node_count", s.node_count},
          {"burnable_sources", s.burnable_sources},
          {"candidate_pairs", s.candidate_pairs},
          {"degenerate_pairs", s.degenerate_pairs},
          {"retained_edges", s.retained_edges},
          {"min_retained_weight", s.min_retained_weight}};
}

std::vector<std::string> structural_column_names() {
  std::vector<std::string> names(kStructuralSlotNames.begin(), kStructuralSlotNames.end());
  for (const char* c : {"cbd", "cbh", "ch", "cd", "slope", "elevation", "area", "volume"}) names.emplace_back(c);
  for (FuelClass c : kAllFuelClasses) names.push_back("fuel_" + std::string(to_string(c)));
  return names;
}

FeatureTable structural_table(const ContagionGraph& graph, std::span<const NodeIndex> nodes) {
  auto names = structural_column_names();
  FeatureTable t(nodes.size(), names.size());
  t.names = std::move(names);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const Node& n = graph.node(nodes[r]);
    std::size_t c = 0;
    for (double s : n.structural) t.at(r, c++) = s;
    for (double v : {n.canopy.cbd, n.canopy.cbh, n.canopy.ch, n.canopy.cd, n.slope, n.elevation,
                     n.area, n.volume}) {
      t.at(r, c++) = v;
    }
    for (FuelClass fc : kAllFuelClasses) t.at(r, c++) = n.fuel_class == fc ? 1.0 : 0.0;
  }
  return t;
}

std::vector<int> labels_of(const ContagionGraph& graph, std::span<const NodeIndex> nodes) {
  std::vector<int> out;
  out.reserve(nodes.size());
  for (NodeIndex i : nodes) {
    const Node& n = graph.node(i);
    if (!n.label) throw ValidationError("node '" + n.id + "' has no damage label");
    out.push_back(*n.label);
  }
  return out;
}

TrainResult train_gnn(const ContagionGraph& graph, const ScenarioConfig& cfg) {
  TrainConfig tc = cfg.gnn;
  tc.seed = cfg.gnn_seed();
  return train(graph, tc, cfg.gnn_architecture);
}

Forest train_gbdt(const ContagionGraph& graph, const ScenarioConfig& cfg, FitTrace* trace) {
  const auto& train_nodes = graph.masks().train;
  if (train_nodes.empty()) throw ValidationError("train-gbdt: graph has no training mask");
  GbdtConfig gc = cfg.gbdt;
  gc.seed = cfg.gbdt_seed();
  return fit(structural_table(graph, train_nodes), labels_of(graph, train_nodes), gc, trace);
}

StackerFit fit_stacker_on_validation(const ContagionGraph& graph, const GatParams& gat,
                                     const Forest& forest) {
  const auto& val = graph.masks().val;
  if (val.empty()) throw ValidationError("stack: graph has no validation mask");
  const auto p_gnn = predict_proba(graph, gat, val);
  const auto p_xgb = predict_proba(forest, structural_table(graph, val));
  return fit_stacker(p_gnn, p_xgb, labels_of(graph, val));
}

Predictions predict(const ContagionGraph& graph, const ModelBundle& bundle,
                    std::span<const NodeIndex> nodes) {
  Predictions p;
  p.nodes.assign(nodes.begin(), nodes.end());
  p.p_gnn = predict_proba(graph, bundle.gat, nodes);
  p.p_xgb = predict_proba(bundle.forest, structural_table(graph, nodes));
  p.p_stack.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    p.p_stack[i] = stack_predict(bundle.stacker, p.p_gnn[i], p.p_xgb[i]);
  }
  return p;
}

std::vector<TriageRecord> triage_records(const ContagionGraph& graph, const Predictions& p,
                                         double threshold) {
  std::vector<TriageRecord> out;
  out.reserve(p.nodes.size());
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const Node& n = graph.node(p.nodes[i]);
    out.push_back({n.id, n.lonlat, p.p_gnn[i], p.p_xgb[i], p.p_stack[i],
                   triage(p.p_gnn[i], p.p_xgb[i], threshold)});
  }
  return out;
}

std::string predictions_csv(const ContagionGraph& graph, const Predictions& p) {
  std::ostringstream os;
  os << "id,label,p_gnn,p_xgb,p_stack\n";
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const Node& n = graph.node(p.nodes[i]);
    os << n.id << ',' << (n.label ? std::to_string(*n.label) : std::string()) << ','
       << format_double(p.p_gnn[i]) << ',' << format_double(p.p_xgb[i]) << ','
       << format_double(p.p_stack[i]) << '\n';
  }
  return os.str();
}

EvalSummary eval_all(const fs::path& scenario_dir, const fs::path& out_dir, const ScenarioConfig& cfg,
                     unsigned threads) {
  const Catalog catalog = cfg.catalog();
  const Scenario scenario = load_scenario(scenario_dir, catalog);
  PreparedGraph prepared = prepare_graph(scenario, cfg, threads);
  const ContagionGraph& graph = prepared.graph;
  const auto& masks = graph.masks();
  if (masks.test.empty()) throw ValidationError("eval-all: scenario needs at least ten labeled buildings");

  const std::string hash = cfg.hash();
  fs::create_directories(out_dir);
  write_json(out_dir / "config.json", cfg.to_json());
  write_json(out_dir / "graph.json", graph_to_json(graph, hash));
  write_json(out_dir / "build_summary.json", summary_to_json(prepared.summary));

  const TrainResult gnn = train_gnn(graph, cfg);
  FitTrace trace;
  const Forest forest = train_gbdt(graph, cfg, &trace);
  const StackerFit stacker = fit_stacker_on_validation(graph, gnn.params, forest);
  if (stacker.separation_warning) warn("stack: validation predictions look perfectly separated");

  ModelBundle bundle{gnn.params, forest, stacker.coefficients, hash};
  write_json(out_dir / "model_bundle.json", bundle.to_json());
  write_json(out_dir / "gnn_history.json", history_json(gnn));

  const Predictions pred = predict(graph, bundle, masks.test);
  const auto labels = labels_of(graph, masks.test);
  const double t = cfg.stacker.decision_threshold;

  EvalSummary s;
  s.build = prepared.summary;
  s.test_size = masks.test.size();
  s.gnn = classification_metrics(labels, pred.p_gnn, t);
  s.gbdt = classification_metrics(labels, pred.p_xgb, t);
  s.stack = classification_metrics(labels, pred.p_stack, t);
  s.centrality = outcome_centrality_report(graph, masks.test, pred.p_gnn);
  s.attention_importance = attention_feature_importance(gnn.params);
  s.gbdt_importance = gain_importance(forest);
  s.stacker = stacker;

  const auto records = triage_records(graph, pred, t);
  for (const auto& r : records) {
    const auto k = static_cast<std::size_t>(
        std::find(kAllQuadrants.begin(), kAllQuadrants.end(), r.quadrant) - kAllQuadrants.begin());
    ++s.quadrant_counts[k];
  }

  json importance = json::object();
  const auto names = structural_column_names();
  for (std::size_t i = 0; i < names.size(); ++i) importance[names[i]] = s.gbdt_importance[i];
  json quadrants = json::object();
  for (std::size_t k = 0; k < 4; ++k) quadrants[std::string(to_string(kAllQuadrants[k]))] = s.quadrant_counts[k];
  const auto& ai = s.attention_importance;
  write_json(out_dir / "metrics.json",
             {{"config_hash", hash},
              {"test_size", s.test_size},
              {"gnn", s.gnn.to_json()},
              {"gbdt", s.gbdt.to_json()},
              {"stack", s.stack.to_json()},
              {"stacker",
               {{"coefficients", stacker.coefficients.to_json()},
                {"iterations", stacker.iterations},
                {"converged", stacker.converged},
                {"separation_warning", stacker.separation_warning},
                {"log_loss", stacker.log_loss}}},
              {"gnn_group_importance",
               {{"embeddings", ai.embeddings},
                {"topographic", ai.topographic},
                {"structural", ai.structural},
                {"total", ai.total()}}},
              {"gbdt_gain_importance", importance},
              {"gbdt_train_logloss", trace.train_logloss},
              {"triage_counts", quadrants}});
  write_json(out_dir / "centrality.json", s.centrality.to_json());
  write_text(out_dir / "confusion_gnn.csv", confusion_csv(s.gnn));
  write_text(out_dir / "confusion_gbdt.csv", confusion_csv(s.gbdt));
  write_text(out_dir / "confusion_stack.csv", confusion_csv(s.stack));
  write_text(out_dir / "predictions.csv", predictions_csv(graph, pred));
  write_text(out_dir / "triage.csv", triage_csv(records));
  write_json(out_dir / "triage.geojson", triage_geojson(records));

  std::ostringstream report;
  report << "nodes " << s.build.node_count << ", retained edges " << s.build.retained_edges
         << ", test buildings " << s.test_size << "\n\n";
  report << metrics_table("GNN", s.gnn) << metrics_table("GBDT", s.gbdt)
         << metrics_table("Stacked", s.stack);
  report << "\nstacker: beta0 " << fmt(stacker.coefficients.beta0) << ", beta_gnn "
         << fmt(stacker.coefficients.beta_gnn) << ", beta_xgb " << fmt(stacker.coefficients.beta_xgb)
         << "\n\noutcome        n     degree mean (sd)     eigenvector mean (sd)\n";
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& row = s.centrality.rows[k];
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %-5zu %.4f (%.4f)      %.4f (%.4f)\n",
                  std::string(to_string(static_cast<Outcome>(k))).c_str(), row.count, row.degree_mean,
                  row.degree_sd, row.eigen_mean, row.eigen_sd);
    report << line;
  }
  report << "\ntriage:";
  for (std::size_t k = 0; k < 4; ++k) report << " " << to_string(kAllQuadrants[k]) << "=" << s.quadrant_counts[k];
  report << "\n";
  write_text(out_dir / "report.txt", report.str());
  return s;
}

}  // namespace wuigraph

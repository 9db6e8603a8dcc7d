#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wuigraph/config.hpp"
#include "wuigraph/diagnostics.hpp"
#include "wuigraph/io.hpp"

namespace wuigraph {

struct PreparedGraph {
  ContagionGraph graph;
  BuildSummary summary;
  LocalProjection projection{LonLat{0.0, 0.0}};
};

/// Projects the scenario around the building centroid, discretizes
/// vegetation, attaches features, builds and prunes the graph, and (when at
/// least ten buildings are labeled) splits it.
PreparedGraph prepare_graph(const Scenario& scenario, const ScenarioConfig& cfg, unsigned threads);

nlohmann::json summary_to_json(const BuildSummary& s);

/// Tabular building features for the boosted trees: 8 structural scores,
/// canopy cbd/cbh/ch/cd (NaN when missing), slope, elevation, area, volume
/// and a one-hot fuel class.
FeatureTable structural_table(const ContagionGraph& graph, std::span<const NodeIndex> nodes);
std::vector<std::string> structural_column_names();

/// Labels of labeled nodes; throws ValidationError for an unlabeled one.
std::vector<int> labels_of(const ContagionGraph& graph, std::span<const NodeIndex> nodes);

TrainResult train_gnn(const ContagionGraph& graph, const ScenarioConfig& cfg);
Forest train_gbdt(const ContagionGraph& graph, const ScenarioConfig& cfg, FitTrace* trace = nullptr);
/// Fits the stacker on validation-split predictions of both specialists.
StackerFit fit_stacker_on_validation(const ContagionGraph& graph, const GatParams& gat,
                                     const Forest& forest);

struct Predictions {
  std::vector<NodeIndex> nodes;
  std::vector<double> p_gnn, p_xgb, p_stack;
};

Predictions predict(const ContagionGraph& graph, const ModelBundle& bundle,
                    std::span<const NodeIndex> nodes);

std::vector<TriageRecord> triage_records(const ContagionGraph& graph, const Predictions& p,
                                         double threshold);

/// Writes node id, label (blank when unknown) and the three probabilities.
std::string predictions_csv(const ContagionGraph& graph, const Predictions& p);

struct EvalSummary {
  MetricsReport gnn, gbdt, stack;
  CentralityReport centrality;
  GroupImportance attention_importance;
  std::vector<double> gbdt_importance;
  StackerFit stacker;
  BuildSummary build;
  std::array<std::size_t, 4> quadrant_counts{};  // test set, kAllQuadrants order
  std::size_t test_size = 0;
};

/// Full run from a scenario directory: graph, both specialists, stacker,
/// test metrics, centrality report and triage layers. Every artifact lands
/// in `out_dir`; none carries timestamps or absolute paths.
EvalSummary eval_all(const std::filesystem::path& scenario_dir, const std::filesystem::path& out_dir,
                     const ScenarioConfig& cfg, unsigned threads);

}  // namespace wuigraph

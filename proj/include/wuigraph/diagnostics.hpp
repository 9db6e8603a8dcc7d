#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wuigraph/graph.hpp"

namespace wuigraph {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  ClassMetrics survived;  // class 0
  ClassMetrics damaged;   // class 1
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> roc_auc;  // absent when scores were not supplied or one class is missing

  std::size_t total() const { return tp + fp + tn + fn; }
  nlohmann::json to_json() const;
};

/// Confusion counts and per-class rates at `threshold` (inclusive: p >=
/// threshold predicts damaged). Throws ValidationError on empty or
/// misaligned input. Rates with a zero denominator are 0.
MetricsReport classification_metrics(std::span<const int> labels, std::span<const double> scores,
                                     double threshold = 0.5);

/// Report from confusion counts alone.
MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

/// Mann-Whitney statistic with mid-ranks for ties. Throws ValidationError
/// when either class is absent.
double roc_auc(std::span<const int> labels, std::span<const double> scores);

/// Mean p_total over the node's incoming edges; 0 without in-edges.
double degree_centrality(const ContagionGraph& graph, NodeIndex node);

struct EigenvectorResult {
  std::vector<double> scores;  // L2-normalized, non-negative
  int iterations = 0;
  double residual = 0.0;
};

/// Principal left eigenvector of the weighted adjacency (x_t = sum over
/// in-edges s->t of w * x_s) by shifted power iteration. Throws
/// ComputationError when it fails to converge and ValidationError for a graph
/// without edges.
EigenvectorResult eigenvector_centrality(const ContagionGraph& graph, double tol = 1e-10,
                                         int max_iter = 10000);

enum class Outcome { TruePositive, FalsePositive, TrueNegative, FalseNegative };
std::string_view to_string(Outcome o);

struct OutcomeStats {
  std::size_t count = 0;
  double degree_mean = 0.0, degree_sd = 0.0;
  double eigen_mean = 0.0, eigen_sd = 0.0;
};

struct CentralityReport {
  std::array<OutcomeStats, 4> rows;  // indexed by Outcome
  bool eigenvector_available = true;

  const OutcomeStats& at(Outcome o) const { return rows[static_cast<std::size_t>(o)]; }
  nlohmann::json to_json() const;
};

/// Groups `nodes` (usually the test mask) by confusion outcome of `scores`
/// at 0.5 and summarizes both centralities per group. Eigenvector
/// centrality is computed on the full graph; if it cannot be computed the
/// report carries zeros and eigenvector_available = false.
CentralityReport outcome_centrality_report(const ContagionGraph& graph,
                                           std::span<const NodeIndex> nodes,
                                           std::span<const double> scores);

}  // namespace wuigraph

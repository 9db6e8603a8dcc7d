#include "wuigraph/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wuigraph/error.hpp"

namespace wuigraph {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

nlohmann::json class_json(const ClassMetrics& c) {
  return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {
      {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}},
      {"survived", class_json(survived)},
      {"damaged", class_json(damaged)},
      {"accuracy", accuracy},
      {"macro_f1", macro_f1},
      {"weighted_f1", weighted_f1},
  };
  j["roc_auc"] = roc_auc ? nlohmann::json(*roc_auc) : nlohmann::json(nullptr);
  return j;
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  if (r.total() == 0) throw ValidationError("metrics: empty input");
  r.damaged.precision = ratio(tp, tp + fp);
  r.damaged.recall = ratio(tp, tp + fn);
  r.damaged.f1 = harmonic(r.damaged.precision, r.damaged.recall);
  r.damaged.support = tp + fn;
  r.survived.precision = ratio(tn, tn + fn);
  r.survived.recall = ratio(tn, tn + fp);
  r.survived.f1 = harmonic(r.survived.precision, r.survived.recall);
  r.survived.support = tn + fp;
  r.accuracy = ratio(tp + tn, r.total());
  r.macro_f1 = 0.5 * (r.damaged.f1 + r.survived.f1);
  r.weighted_f1 = (r.damaged.f1 * static_cast<double>(r.damaged.support) +
                   r.survived.f1 * static_cast<double>(r.survived.support)) /
                  static_cast<double>(r.total());
  return r;
}

MetricsReport classification_metrics(std::span<const int> labels, std::span<const double> scores,
                                     double threshold) {
  if (labels.empty()) throw ValidationError("metrics: empty input");
  if (labels.size() != scores.size()) throw ValidationError("metrics: labels and scores differ in length");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] != 0;
    has0 |= !truth;
    has1 |= truth;
    if (pred && truth) ++tp;
    else if (pred) ++fp;
    else if (truth) ++fn;
    else ++tn;
  }
  MetricsReport r = metrics_from_counts(tp, fp, tn, fn);
  if (has0 && has1) r.roc_auc = roc_auc(labels, scores);
  return r;
}

double roc_auc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw ValidationError("roc_auc: labels and scores differ in length");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        rank_sum += mid;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("roc_auc: undefined with a single class");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double degree_centrality(const ContagionGraph& graph, NodeIndex node) {
  const auto in = graph.incoming(node);
  if (in.empty()) return 0.0;
  double s = 0.0;
  for (auto e : in) s += graph.edges()[e].weights.p_total;
  return s / static_cast<double>(in.size());
}

EigenvectorResult eigenvector_centrality(const ContagionGraph& graph, double tol, int max_iter) {
  if (graph.edge_count() == 0) throw ValidationError("eigenvector_centrality: graph has no edges");
  const std::size_t n = graph.node_count();
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);
  EigenvectorResult r;
  for (int it = 1; it <= max_iter; ++it) {
    // (A^T + I) x; the identity shift removes periodicity without moving
    // the eigenvectors.
    next = x;
    for (const Edge& e : graph.edges()) next[e.target] += e.weights.p_total * x[e.source];
    double norm = 0.0;
    for (double v : next) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw ComputationError("eigenvector_centrality: iterate collapsed to zero");
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= norm;
      change += std::fabs(next[i] - x[i]);
    }
    x.swap(next);
    r.iterations = it;
    r.residual = change;
    if (change < static_cast<double>(n) * tol) {
      r.scores = std::move(x);
      return r;
    }
  }
  throw ComputationError("eigenvector_centrality: no convergence after " + std::to_string(max_iter) +
                         " iterations (last L1 change " + std::to_string(r.residual) + ")");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::TruePositive: return "true_positive";
    case Outcome::FalsePositive: return "false_positive";
    case Outcome::TrueNegative: return "true_negative";
    case Outcome::FalseNegative: return "false_negative";
  }
  return "true_negative";
}

nlohmann::json CentralityReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& s = rows[k];
    j[std::string(to_string(static_cast<Outcome>(k)))] = {
        {"count", s.count},
        {"degree_mean", s.degree_mean},
        {"degree_sd", s.degree_sd},
        {"eigenvector_mean", s.eigen_mean},
        {"eigenvector_sd", s.eigen_sd}};
  }
  j["eigenvector_available"] = eigenvector_available;
  return j;
}

CentralityReport outcome_centrality_report(const ContagionGraph& graph,
                                           std::span<const NodeIndex> nodes,
                                           std::span<const double> scores) {
  if (nodes.size() != scores.size()) {
    throw ValidationError("centrality report: nodes and scores differ in length");
  }
  CentralityReport report;
  std::vector<double> eigen;
  try {
    eigen = eigenvector_centrality(graph).scores;
  } catch (const std::exception& e) {
    warn(std::string("centrality report: eigenvector centrality unavailable: ") + e.what());
    report.eigenvector_available = false;
  }
  std::array<std::vector<double>, 4> degree, eig;
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    const Node& node = graph.node(nodes[t]);
    if (!node.label) throw ValidationError("centrality report: node '" + node.id + "' is unlabeled");
    const bool truth = *node.label != 0;
    const bool pred = scores[t] >= 0.5;
    const Outcome o = pred ? (truth ? Outcome::TruePositive : Outcome::FalsePositive)
                           : (truth ? Outcome::FalseNegative : Outcome::TrueNegative);
    const auto k = static_cast<std::size_t>(o);
    degree[k].push_back(degree_centrality(graph, nodes[t]));
    eig[k].push_back(eigen.empty() ? 0.0 : eigen[nodes[t]]);
  }
  auto mean_sd = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {0.0, 0.0};
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size()))};
  };
  for (std::size_t k = 0; k < 4; ++k) {
    auto& row = report.rows[k];
    row.count = degree[k].size();
    std::tie(row.degree_mean, row.degree_sd) = mean_sd(degree[k]);
    std::tie(row.eigen_mean, row.eigen_sd) = mean_sd(eig[k]);
  }
  return report;
}

}  // namespace wuigraph

#include "wuigraph/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wuigraph/error.hpp"

namespace wuigraph {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  bool default_left = false;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureTable& table, const std::vector<double>& grad,
              const std::vector<double>& hess, const GbdtConfig& cfg)
      : table_(table), grad_(grad), hess_(hess), cfg_(cfg) {}

  Tree build() {
    std::vector<std::size_t> rows(table_.rows);
    std::iota(rows.begin(), rows.end(), 0);
    Tree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  double score(double g, double h) const { return g * g / (h + cfg_.lambda_reg); }

  int grow(Tree& tree, const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double g = 0.0, h = 0.0;
    for (auto r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    tree.nodes[static_cast<std::size_t>(id)].leaf = -g / (h + cfg_.lambda_reg);
    if (depth >= cfg_.max_depth || rows.size() < 2) return id;

    const SplitCandidate best = find_split(rows, g, h);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      const double x = table_.at(r, static_cast<std::size_t>(best.feature));
      const bool go_left = std::isnan(x) ? best.default_left : x < best.threshold;
      (go_left ? left : right).push_back(r);
    }
    {
      auto& node = tree.nodes[static_cast<std::size_t>(id)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.default_left = best.default_left;
      node.gain = best.gain;
    }
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    tree.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  // Ties resolve to the lowest feature index, then the lowest threshold.
  SplitCandidate find_split(const std::vector<std::size_t>& rows, double g_total,
                            double h_total) const {
    SplitCandidate best;
    const double parent = score(g_total, h_total);
    std::vector<std::pair<double, std::size_t>> present;
    present.reserve(rows.size());
    for (std::size_t f = 0; f < table_.cols; ++f) {
      present.clear();
      double g_miss = 0.0, h_miss = 0.0;
      for (auto r : rows) {
        const double x = table_.at(r, f);
        if (std::isnan(x)) {
          g_miss += grad_[r];
          h_miss += hess_[r];
        } else {
          present.emplace_back(x, r);
        }
      }
      if (present.size() < 2) continue;
      std::sort(present.begin(), present.end());
      const bool has_missing = present.size() < rows.size();
      double gl = 0.0, hl = 0.0;
      for (std::size_t k = 0; k + 1 < present.size(); ++k) {
        gl += grad_[present[k].second];
        hl += hess_[present[k].second];
        const double a = present[k].first, b = present[k + 1].first;
        if (a == b) continue;
        double threshold = 0.5 * (a + b);
        if (!(threshold > a)) threshold = b;
        for (int dir = 0; dir < (has_missing ? 2 : 1); ++dir) {
          const bool miss_left = dir == 1;
          const double GL = gl + (miss_left ? g_miss : 0.0);
          const double HL = hl + (miss_left ? h_miss : 0.0);
          const double GR = g_total - GL, HR = h_total - HL;
          if (HL < cfg_.min_child_weight || HR < cfg_.min_child_weight) continue;
          const double gain = 0.5 * (score(GL, HL) + score(GR, HR) - parent) - cfg_.gamma_split;
          if (gain > best.gain) {
            best = {static_cast<int>(f), threshold, miss_left, gain};
          }
        }
      }
    }
    return best;
  }

  const FeatureTable& table_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const GbdtConfig& cfg_;
};

}  // namespace

void GbdtConfig::validate() const {
  if (n_trees < 1) throw ValidationError("gbdt: n_trees must be >= 1");
  if (max_depth < 1) throw ValidationError("gbdt: max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("gbdt: learning_rate must be in (0, 1]");
  }
  if (min_child_weight < 0.0 || lambda_reg < 0.0 || gamma_split < 0.0) {
    throw ValidationError("gbdt: regularization terms must be >= 0");
  }
}

double Tree::leaf_value(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& n = nodes[id];
    const double x = row[static_cast<std::size_t>(n.feature)];
    const bool go_left = std::isnan(x) ? n.default_left : x < n.threshold;
    id = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return nodes[id].leaf;
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  // Iterative walk carrying depths.
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

double log_loss(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw ValidationError("log_loss: sizes must match and be non-empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], 1e-15, 1.0 - 1e-15);
    s -= labels[i] ? std::log(p) : std::log1p(-p);
  }
  return s / static_cast<double>(probs.size());
}

Forest fit(const FeatureTable& table, std::span<const int> labels, const GbdtConfig& cfg,
           FitTrace* trace) {
  cfg.validate();
  if (table.rows < 2) throw ValidationError("gbdt fit: at least 2 rows are required");
  if (labels.size() != table.rows) throw ValidationError("gbdt fit: label count differs from rows");
  if (table.data.size() != table.rows * table.cols) throw ValidationError("gbdt fit: malformed table");
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("gbdt fit: labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == table.rows) {
    throw ValidationError("gbdt fit: both label classes must be present");
  }

  Forest forest;
  const double prior = static_cast<double>(positives) / static_cast<double>(table.rows);
  forest.base_score = std::log(prior / (1.0 - prior));
  forest.learning_rate = cfg.learning_rate;
  forest.n_features = table.cols;
  forest.feature_names = table.names;

  std::vector<double> margin(table.rows, forest.base_score);
  std::vector<double> grad(table.rows), hess(table.rows), probs(table.rows);
  for (int t = 0; t < cfg.n_trees; ++t) {
    for (std::size_t r = 0; r < table.rows; ++r) {
      const double p = sigmoid(margin[r]);
      grad[r] = p - static_cast<double>(labels[r]);
      hess[r] = std::max(p * (1.0 - p), 1e-16);
    }
    Tree tree = TreeBuilder(table, grad, hess, cfg).build();
    for (std::size_t r = 0; r < table.rows; ++r) {
      margin[r] += cfg.learning_rate * tree.leaf_value(table.row(r));
    }
    forest.trees.push_back(std::move(tree));
    if (trace) {
      for (std::size_t r = 0; r < table.rows; ++r) probs[r] = sigmoid(margin[r]);
      trace->train_logloss.push_back(log_loss(probs, labels));
    }
  }
  return forest;
}

std::vector<double> predict_margin(const Forest& forest, const FeatureTable& table) {
  if (table.cols != forest.n_features) {
    throw ValidationError("gbdt predict: table has " + std::to_string(table.cols) +
                          " columns, model expects " + std::to_string(forest.n_features));
  }
  std::vector<double> out(table.rows, forest.base_score);
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (const auto& tree : forest.trees) out[r] += forest.learning_rate * tree.leaf_value(table.row(r));
  }
  return out;
}

std::vector<double> predict_proba(const Forest& forest, const FeatureTable& table) {
  auto m = predict_margin(forest, table);
  for (double& v : m) v = sigmoid(v);
  return m;
}

std::vector<double> gain_importance(const Forest& forest) {
  std::vector<double> gains(forest.n_features, 0.0);
  for (const auto& tree : forest.trees) {
    for (const auto& n : tree.nodes) {
      if (!n.is_leaf()) gains[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  const double total = std::accumulate(gains.begin(), gains.end(), 0.0);
  if (total > 0.0) {
    for (double& g : gains) g /= total;
  }
  return gains;
}

nlohmann::json Forest::to_json() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const auto& tree : trees) {
    nlohmann::json nodes_json = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes_json.push_back({n.feature, n.threshold, n.default_left, n.left, n.right, n.leaf, n.gain});
    }
    trees_json.push_back(nodes_json);
  }
  return {{"format", "wuigraph.gbdt"},
          {"version", 1},
          {"base_score", base_score},
          {"learning_rate", learning_rate},
          {"n_features", n_features},
          {"feature_names", feature_names},
          {"node_layout", {"feature", "threshold", "default_left", "left", "right", "leaf", "gain"}},
          {"trees", trees_json}};
}

Forest Forest::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "wuigraph.gbdt" || j.value("version", 0) != 1) {
    throw ValidationError("gbdt forest: unsupported format or version");
  }
  Forest f;
  f.base_score = j.at("base_score").get<double>();
  f.learning_rate = j.at("learning_rate").get<double>();
  f.n_features = j.at("n_features").get<std::size_t>();
  f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& tj : j.at("trees")) {
    Tree t;
    for (const auto& nj : tj) {
      if (!nj.is_array() || nj.size() != 7) throw ValidationError("gbdt forest: malformed tree node");
      TreeNode n;
      n.feature = nj[0].get<int>();
      n.threshold = nj[1].get<double>();
      n.default_left = nj[2].get<bool>();
      n.left = nj[3].get<int>();
      n.right = nj[4].get<int>();
      n.leaf = nj[5].get<double>();
      n.gain = nj[6].get<double>();
      t.nodes.push_back(n);
    }
    const auto count = static_cast<int>(t.nodes.size());
    for (const auto& n : t.nodes) {
      if (!n.is_leaf() && (n.feature >= static_cast<int>(f.n_features) || n.left <= 0 ||
                           n.right <= 0 || n.left >= count || n.right >= count)) {
        throw ValidationError("gbdt forest: tree node references are out of range");
      }
    }
    if (t.nodes.empty()) throw ValidationError("gbdt forest: empty tree");
    f.trees.push_back(std::move(t));
  }
  return f;
}

}  // namespace wuigraph

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace wuigraph {

/// Dense row-major table. NaN marks a missing value.
struct FeatureTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<std::string> names;

  FeatureTable() = default;
  FeatureTable(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

struct GbdtConfig {
  int n_trees = 300;
  int max_depth = 6;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;
  double lambda_reg = 1.0;
  double gamma_split = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = false;  // where missing values go
  int left = -1;
  int right = -1;
  double leaf = 0.0;  // raw Newton step; scaled by the learning rate at prediction
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double leaf_value(std::span<const double> row) const;
  int depth() const;
};

/// Boosted ensemble: sigmoid(base_score + learning_rate * sum of leaves).
struct Forest {
  double base_score = 0.0;  // log-odds
  double learning_rate = 0.1;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;

  nlohmann::json to_json() const;
  static Forest from_json(const nlohmann::json& j);
};

struct FitTrace {
  std::vector<double> train_logloss;  // after each boosting round
};

/// Second-order boosting on the logistic loss with exact greedy splits.
/// Throws ValidationError for fewer than 2 rows, a single label class or
/// mismatched sizes.
Forest fit(const FeatureTable& table, std::span<const int> labels, const GbdtConfig& cfg,
           FitTrace* trace = nullptr);

std::vector<double> predict_margin(const Forest& forest, const FeatureTable& table);
/// Throws ValidationError when the column count differs from training.
std::vector<double> predict_proba(const Forest& forest, const FeatureTable& table);

/// Total split gain per feature normalized to sum to 1; all zeros when the
/// forest has no split.
std::vector<double> gain_importance(const Forest& forest);

/// Mean logistic loss of probabilities against labels.
double log_loss(std::span<const double> probs, std::span<const int> labels);

}  // namespace wuigraph

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wuigraph/graph.hpp"

namespace wuigraph {

class Rng;

enum class HeadActivation { Relu, Elu };

/// Shape of the edge-aware attention layer and its classification head.
struct GatArchitecture {
  int heads = 4;
  int head_dim = 64;
  int mlp_hidden1 = 128;
  int mlp_hidden2 = 64;
  double leaky_slope = 0.2;
  HeadActivation activation = HeadActivation::Relu;

  int output_dim() const { return heads * head_dim; }
  void validate() const;
};

inline constexpr int kEdgeFeatureDim = 4;  // (p_total, p_conv, p_rad, p_ember)

struct TrainConfig {
  double lr = 5e-4;
  double weight_decay = 1e-6;
  double gat_dropout = 0.05;
  double mlp_dropout = 0.1;
  int epochs = 1000;
  int patience = 100;
  bool lr_decay = true;
  double lr_decay_factor = 0.9;
  int lr_decay_every = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// All learnable tensors plus the fixed input standardization.
/// Bias vectors are stored as single-column matrices so every tensor can be
/// visited uniformly.
struct GatParams {
  GatArchitecture arch;
  Eigen::VectorXd input_shift;  // 74
  Eigen::VectorXd input_scale;  // 74, > 0
  Eigen::MatrixXd W;            // heads*head_dim x 74
  Eigen::MatrixXd theta;        // heads*head_dim x 4
  Eigen::MatrixXd attention;    // heads x 3*head_dim: [center | neighbor | edge]
  Eigen::MatrixXd gat_bias;     // heads*head_dim x 1
  Eigen::MatrixXd W1, b1;       // h1 x 256, h1 x 1
  Eigen::MatrixXd W2, b2;       // h2 x h1, h2 x 1
  Eigen::MatrixXd W3, b3;       // 1 x h2, 1 x 1
  std::uint64_t seed = 0;

  /// Glorot-uniform weights, zero biases. Standardization defaults to the
  /// identity.
  static GatParams initialize(const GatArchitecture& arch, std::uint64_t seed);
  /// Zero tensors of matching shapes (used for gradients).
  static GatParams zeros_like(const GatParams& p);

  /// Visits every learnable tensor in a fixed order with its name.
  void for_each_tensor(const std::function<void(const char*, Eigen::MatrixXd&)>& f);
  void for_each_tensor(const std::function<void(const char*, const Eigen::MatrixXd&)>& f) const;
  std::size_t parameter_count() const;

  /// Throws ValidationError when any tensor shape disagrees with `arch`.
  void validate_shapes() const;

  nlohmann::json to_json() const;
  static GatParams from_json(const nlohmann::json& j);
};

/// Per-column standardization from the graph's node features
/// (population standard deviation; constant columns get scale 1).
void fit_standardization(GatParams& params, const ContagionGraph& graph);

struct GatOutput {
  Eigen::MatrixXd embeddings;  // output_dim x n, column per node
  Eigen::MatrixXd attention;   // edge_count x heads, alpha per incoming edge
};

struct Dropout {
  double gat = 0.0;
  double mlp = 0.0;
  Rng* rng = nullptr;  // nullptr or zero rates: evaluation mode
};

/// Attention layer for every node. With a non-null dropout rng, attention
/// coefficients are dropped at `gat` rate.
GatOutput gat_forward(const ContagionGraph& graph, const GatParams& params,
                      const Dropout& dropout = {});

/// Damage probability per building, in building_indices() order.
std::vector<double> predict_proba(const ContagionGraph& graph, const GatParams& params);

/// Probabilities for the given node indices (evaluation mode).
std::vector<double> predict_proba(const ContagionGraph& graph, const GatParams& params,
                                  std::span<const NodeIndex> nodes);

struct LossAndGrads {
  double loss = 0.0;       // data loss + L2 term
  double data_loss = 0.0;  // mean binary cross-entropy
  GatParams grads;
};

/// Mean BCE over `mask` (labeled buildings) plus weight_decay/2 * ||theta||^2,
/// with exact gradients. Throws ValidationError for an empty mask or an
/// unlabeled node in it.
LossAndGrads loss_and_grads(const ContagionGraph& graph, const GatParams& params,
                            std::span<const NodeIndex> mask, double weight_decay,
                            const Dropout& dropout = {});

/// Loss only, in evaluation mode.
double evaluate_loss(const ContagionGraph& graph, const GatParams& params,
                     std::span<const NodeIndex> mask, double weight_decay = 0.0);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  GatParams params;  // best validation loss
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  bool early_stopped = false;
};

/// Full-batch Adam on masks().train with early stopping on masks().val (or on
/// the train loss when the validation mask is empty). Throws
/// ComputationError on a non-finite loss.
TrainResult train(const ContagionGraph& graph, const TrainConfig& cfg,
                  const GatArchitecture& arch = {});

struct GroupImportance {
  double embeddings = 0.0;
  double topographic = 0.0;
  double structural = 0.0;

  double total() const { return embeddings + topographic + structural; }
};

/// L1 norm of each input column of W summed over heads, aggregated over the
/// embedding, topographic and structural slot groups.
GroupImportance attention_feature_importance(const GatParams& params);
std::array<double, kFeatureDim> input_column_importance(const GatParams& params);

}  // namespace wuigraph

#include "oracles.hpp"

#include <wuigraph/error.hpp>
#include <wuigraph/gat.hpp>
#include <wuigraph/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

using namespace wuigraph;
using namespace wuigraph::testing;


TEST(GatForward, AttentionRowsSumToOne) {
  const ContagionGraph g = random_graph(20, 4, 1);
  const GatParams p = GatParams::initialize({}, 3);
  const GatOutput out = gat_forward(g, p);
  ASSERT_EQ(out.attention.rows(), static_cast<Eigen::Index>(g.edge_count()));
  ASSERT_EQ(out.attention.cols(), 4);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto in = g.incoming(i);
    if (in.empty()) continue;
    for (int h = 0; h < 4; ++h) {
      double sum = 0.0;
      for (auto e : in) sum += out.attention(e, h);
      EXPECT_NEAR(sum, 1.0, 1e-9) << "node " << i << " head " << h;
    }
  }
}

TEST(GatForward, SingletonAndSymmetricAttention) {
  std::vector<Node> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back(make_building("s" + std::to_string(i), {i * 10.0, 0}, Material::Wood, 100));
  const EdgeWeights w{0.5, 0.1, 0.2, 0.64};
  // Node 0 has one in-neighbour; node 4 has three identical in-neighbours.
  for (int i = 1; i < 4; ++i) nodes[i].embedding.fill(0.3);
  const ContagionGraph g(nodes, {{1, 0, w}, {1, 4, w}, {2, 4, w}, {3, 4, w}});
  const GatOutput out = gat_forward(g, GatParams::initialize({}, 8));
  for (int h = 0; h < 4; ++h) {
    EXPECT_EQ(out.attention(g.incoming(0)[0], h), 1.0);
    for (auto e : g.incoming(4)) EXPECT_NEAR(out.attention(e, h), 1.0 / 3.0, 1e-15);
  }
}

TEST(GatForward, ZeroFinalLayerGivesHalf) {
  const ContagionGraph g = random_graph(15, 3, 2);
  GatParams p = GatParams::initialize({}, 4);
  p.W3.setZero();
  p.b3.setZero();
  for (double prob : predict_proba(g, p)) EXPECT_EQ(prob, 0.5);
}

TEST(GatForward, EvalModeIsPureAndProbabilitiesInRange) {
  const ContagionGraph g = random_graph(25, 4, 3);
  GatParams p = GatParams::initialize({}, 5);
  fit_standardization(p, g);
  const auto a = predict_proba(g, p);
  const auto b = predict_proba(g, p);
  EXPECT_EQ(a, b);
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  const GatOutput o1 = gat_forward(g, p), o2 = gat_forward(g, p);
  EXPECT_TRUE(o1.embeddings == o2.embeddings);
}

TEST(GatForward, ZeroInDegreeNodeIsIsolated) {
  ContagionGraph g = random_graph(12, 3, 4);
  const GatParams p = GatParams::initialize({}, 6);
  ASSERT_TRUE(g.incoming(0).empty());
  const std::vector<NodeIndex> zero = {0};
  const double before = predict_proba(g, p, zero)[0];
  auto nodes = g.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) nodes[i].embedding.fill(7.5);
  const ContagionGraph changed(nodes, g.edges(), g.masks());
  EXPECT_EQ(predict_proba(changed, p, zero)[0], before);
  EXPECT_TRUE(gat_forward(changed, p).embeddings.col(0) == gat_forward(g, p).embeddings.col(0));
}

TEST(GatForward, PermutationEquivariance) {
  const ContagionGraph g = random_graph(30, 5, 5);
  const GatParams p = GatParams::initialize({}, 7);
  std::vector<NodeIndex> perm(g.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(77);
  rng.shuffle(perm.begin(), perm.end());
  const ContagionGraph h = permute_graph(g, perm);

  const GatOutput a = gat_forward(g, p), b = gat_forward(h, p);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (Eigen::Index r = 0; r < a.embeddings.rows(); ++r) {
      ASSERT_EQ(a.embeddings(r, i), b.embeddings(r, perm[i])) << "node " << i;
    }
  }
  std::vector<NodeIndex> all_g(g.node_count()), all_h(g.node_count());
  std::iota(all_g.begin(), all_g.end(), 0);
  for (NodeIndex i = 0; i < g.node_count(); ++i) all_h[i] = perm[i];
  EXPECT_EQ(predict_proba(g, p, all_g), predict_proba(h, p, all_h));
}

TEST(GatLoss, AnalyticValues) {
  const ContagionGraph g = random_graph(12, 3, 6);
  GatParams p = GatParams::initialize({}, 1);
  p.W3.setZero();
  p.b3.setZero();
  const auto& mask = g.masks().train;
  EXPECT_NEAR(evaluate_loss(g, p, mask), std::log(2.0), 1e-12);
  const LossAndGrads lg = loss_and_grads(g, p, mask, 0.0);
  EXPECT_NEAR(lg.data_loss, std::log(2.0), 1e-12);
  EXPECT_THROW(loss_and_grads(g, p, std::vector<NodeIndex>{}, 0.0), ValidationError);
  const std::vector<NodeIndex> veg = {2};
  EXPECT_THROW(loss_and_grads(g, p, veg, 0.0), ValidationError);
}

TEST(GatLoss, ConfidentCorrectPredictionsApproachZero) {
  const ContagionGraph g = random_graph(12, 3, 7);
  GatParams p = GatParams::initialize({}, 1);
  p.W3.setZero();
  std::vector<NodeIndex> damaged, survived;
  for (NodeIndex i : g.masks().train) (*g.node(i).label ? damaged : survived).push_back(i);
  p.b3(0, 0) = 40.0;
  EXPECT_LT(evaluate_loss(g, p, damaged), 1e-15);
  p.b3(0, 0) = -40.0;
  EXPECT_LT(evaluate_loss(g, p, survived), 1e-15);
  const double l2 = evaluate_loss(g, p, survived, 1e-3) - evaluate_loss(g, p, survived);
  double sq = 0.0;
  p.for_each_tensor([&](const char*, const Eigen::MatrixXd& t) { sq += t.squaredNorm(); });
  EXPECT_NEAR(l2, 0.5e-3 * sq, 1e-12);
}

class GatGradient : public ::testing::TestWithParam<HeadActivation> {};

TEST_P(GatGradient, MatchesCentralDifferences) {
  for (std::uint64_t seed : {11u, 12u}) {
    const ContagionGraph g = random_graph(seed == 11 ? 5 : 9, 3, seed);
    GatParams p = tiny_params(g, seed, GetParam());
    const auto& mask = g.masks().train;
    const double wd = 1e-3;
    const LossAndGrads lg = loss_and_grads(g, p, mask, wd);
    EXPECT_NEAR(lg.loss, evaluate_loss(g, p, mask, wd), 1e-12);

    const GradientCheck check = check_gradients(g, p, wd);
    EXPECT_LE(check.worst, 1e-4) << "seed " << seed << " worst at " << check.worst_at;
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, GatGradient,
                         ::testing::Values(HeadActivation::Relu, HeadActivation::Elu),
                         [](const auto& info) { return info.param == HeadActivation::Relu ? "Relu" : "Elu"; });

TEST(GatTrain, SeparableGraphReachesFullTrainAccuracy) {
  const ContagionGraph g = separable_graph(50, 3);
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.patience = 500;
  cfg.seed = 3;
  const TrainResult r = train(g, cfg);
  const auto probs = predict_proba(g, r.params, g.masks().train);
  int correct = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    correct += (probs[k] >= 0.5) == (*g.node(g.masks().train[k]).label == 1);
  }
  EXPECT_GE(correct, static_cast<int>(std::ceil(0.99 * static_cast<double>(probs.size()))));
}

TEST(GatTrain, DeterministicAndPatience) {
  ContagionGraph g = random_graph(30, 4, 9);
  SplitMasks m = g.masks();
  m.val.assign(m.train.end() - 4, m.train.end());
  m.train.resize(m.train.size() - 4);
  g = g.with_masks(m);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.patience = 40;
  cfg.seed = 1;
  const TrainResult a = train(g, cfg, tiny_arch());
  const TrainResult b = train(g, cfg, tiny_arch());
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    EXPECT_EQ(a.history[k].train_loss, b.history[k].train_loss);
    EXPECT_EQ(a.history[k].val_loss, b.history[k].val_loss);
  }

  cfg.patience = 0;
  cfg.epochs = 200;
  cfg.lr = 0.5;  // large steps make a non-improving epoch appear quickly
  const TrainResult c = train(g, cfg, tiny_arch());
  ASSERT_TRUE(c.early_stopped);
  const auto& h = c.history;
  EXPECT_GE(h.back().val_loss, h[h.size() - 2].val_loss);
  for (std::size_t k = 1; k + 1 < h.size(); ++k) EXPECT_LT(h[k].val_loss, h[k - 1].val_loss);
}

TEST(GatTrain, LearningRateDecaySchedule) {
  const ContagionGraph g = random_graph(12, 3, 10);
  TrainConfig cfg;
  cfg.epochs = 120;
  cfg.patience = 120;
  const TrainResult r = train(g, cfg, tiny_arch());
  ASSERT_EQ(r.history.size(), 120u);
  EXPECT_EQ(r.history[49].lr, 5e-4);
  EXPECT_DOUBLE_EQ(r.history[50].lr, 5e-4 * 0.9);
  EXPECT_DOUBLE_EQ(r.history[100].lr, 5e-4 * 0.81);
}

TEST(GatParams, JsonRoundTripAndShapes) {
  const ContagionGraph g = random_graph(10, 3, 11);
  GatParams p = GatParams::initialize({}, 9);
  fit_standardization(p, g);
  const auto j = p.to_json();
  const GatParams back = GatParams::from_json(j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_EQ(predict_proba(g, back), predict_proba(g, p));
  EXPECT_EQ(p.parameter_count(),
            static_cast<std::size_t>(256 * 74 + 256 * 4 + 4 * 192 + 256 + 128 * 256 + 128 + 64 * 128 + 64 + 64 + 1));
  GatParams bad = p;
  bad.W.resize(10, 74);
  EXPECT_THROW(bad.validate_shapes(), ValidationError);
}

TEST(GatImportance, GroupScores) {
  GatParams p = GatParams::initialize({}, 2);
  const GroupImportance g = attention_feature_importance(p);
  EXPECT_GE(g.embeddings, 0.0);
  EXPECT_GE(g.structural, 0.0);
  EXPECT_NEAR(g.total(), p.W.cwiseAbs().sum(), 1e-9);
  p.W *= 2.0;
  const GroupImportance d = attention_feature_importance(p);
  EXPECT_NEAR(d.embeddings, 2 * g.embeddings, 1e-9);
  EXPECT_NEAR(d.structural, 2 * g.structural, 1e-9);
  p.W.rightCols(kFeatureDim - kEmbeddingDim).setZero();
  EXPECT_EQ(attention_feature_importance(p).structural, 0.0);
  EXPECT_EQ(attention_feature_importance(p).topographic, 0.0);
}

TEST(GatConfig, Validation) {
  GatArchitecture a;
  a.heads = 0;
  EXPECT_THROW(a.validate(), ValidationError);
  TrainConfig t;
  t.lr = 0;
  EXPECT_THROW(t.validate(), ValidationError);
  t = {};
  t.gat_dropout = 1.0;
  EXPECT_THROW(t.validate(), ValidationError);
}

#include "oracles.hpp"

#include <wuigraph/diagnostics.hpp>
#include <wuigraph/error.hpp>
#include <wuigraph/gbdt.hpp>
#include <wuigraph/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace wuigraph;
using namespace wuigraph::testing;


TEST(Gbdt, RootSplitMatchesExhaustiveSearch) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Dataset d = random_dataset(20 + 15 * seed, 1 + seed % 5, seed, seed % 2 == 0);
    GbdtConfig cfg;
    cfg.n_trees = 1;
    cfg.min_child_weight = seed % 3 == 0 ? 3.0 : 1.0;
    const Forest f = fit(d.table, d.labels, cfg);
    const OracleSplit want = exhaustive_root_split(d, cfg);
    const TreeNode& root = f.trees.at(0).nodes.at(0);
    ASSERT_EQ(root.feature, want.feature) << "seed " << seed;
    if (want.feature >= 0) {
      EXPECT_EQ(root.threshold, want.threshold) << "seed " << seed;
      EXPECT_NEAR(root.gain, want.gain, 1e-9 * std::max(1.0, want.gain));
    }
  }
}

TEST(Gbdt, SeparableOneDimensionalDataWithDepthOne) {
  FeatureTable t(40, 1);
  std::vector<int> y;
  for (std::size_t r = 0; r < 40; ++r) {
    t.at(r, 0) = static_cast<double>(r);
    y.push_back(r >= 17 ? 1 : 0);
  }
  GbdtConfig cfg;
  cfg.max_depth = 1;
  cfg.n_trees = 20;
  const Forest f = fit(t, y, cfg);
  EXPECT_EQ(f.trees[0].nodes[0].threshold, 16.5);
  const auto p = predict_proba(f, t);
  for (std::size_t r = 0; r < 40; ++r) EXPECT_EQ(p[r] >= 0.5, y[r] == 1) << r;
}

TEST(Gbdt, SymmetricDataGivesOppositeLeaves) {
  FeatureTable t(4, 1);
  t.data = {0, 1, 2, 3};
  const std::vector<int> y = {0, 0, 1, 1};
  GbdtConfig cfg;
  cfg.n_trees = 1;
  cfg.learning_rate = 1.0;
  cfg.max_depth = 1;
  cfg.min_child_weight = 0.0;
  const Forest f = fit(t, y, cfg);
  ASSERT_EQ(f.trees[0].nodes.size(), 3u);
  EXPECT_EQ(f.base_score, 0.0);
  const double l = f.trees[0].nodes[1].leaf, r = f.trees[0].nodes[2].leaf;
  EXPECT_NEAR(l, -r, 1e-15);
  EXPECT_LT(l, 0.0);
  // Newton step: -G / (H + lambda) with G = +-1, H = 0.5.
  EXPECT_NEAR(r, 1.0 / 1.5, 1e-15);
}

TEST(Gbdt, TrainLogLossNonIncreasing) {
  const Dataset d = random_dataset(300, 6, 99, false);
  GbdtConfig cfg;
  cfg.n_trees = 60;
  FitTrace trace;
  fit(d.table, d.labels, cfg, &trace);
  ASSERT_EQ(trace.train_logloss.size(), 60u);
  for (std::size_t k = 1; k < trace.train_logloss.size(); ++k) {
    EXPECT_LE(trace.train_logloss[k], trace.train_logloss[k - 1] + 1e-12) << k;
  }
}

TEST(Gbdt, HandTracedForest) {
  Forest f;
  f.base_score = -0.2;
  f.learning_rate = 0.5;
  f.n_features = 2;
  Tree a;
  a.nodes = {{0, 1.0, false, 1, 2, 0.0, 1.0}, {-1, 0, false, -1, -1, -0.8, 0}, {-1, 0, false, -1, -1, 1.2, 0}};
  Tree b;
  b.nodes = {{1, 5.0, true, 1, 2, 0.0, 1.0}, {-1, 0, false, -1, -1, 0.4, 0}, {-1, 0, false, -1, -1, -0.6, 0}};
  f.trees = {a, b};
  FeatureTable t(3, 2);
  t.data = {0.5, 9.0, 2.0, 1.0, 1.0, std::numeric_limits<double>::quiet_NaN()};
  const auto p = predict_proba(f, t);
  EXPECT_NEAR(p[0], sigmoid(-0.2 + 0.5 * (-0.8 - 0.6)), 1e-15);
  EXPECT_NEAR(p[1], sigmoid(-0.2 + 0.5 * (1.2 + 0.4)), 1e-15);
  EXPECT_NEAR(p[2], sigmoid(-0.2 + 0.5 * (1.2 + 0.4)), 1e-15);  // 1.0 is not < 1.0; NaN goes left
  EXPECT_EQ(gain_importance(f), (std::vector<double>{0.5, 0.5}));
}

TEST(Gbdt, EmptyForestAndMonotoneTreeAddition) {
  Forest f;
  f.base_score = 0.7;
  f.n_features = 1;
  FeatureTable t(3, 1);
  t.data = {1, 2, 3};
  for (double p : predict_proba(f, t)) EXPECT_DOUBLE_EQ(p, sigmoid(0.7));
  EXPECT_EQ(gain_importance(f), (std::vector<double>{0.0}));
  Tree up;
  up.nodes = {{0, 2.5, false, 1, 2, 0, 1}, {-1, 0, false, -1, -1, 0.1, 0}, {-1, 0, false, -1, -1, 0.3, 0}};
  const auto before = predict_proba(f, t);
  f.trees.push_back(up);
  const auto after = predict_proba(f, t);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_GT(after[r], before[r]);
  FeatureTable wide(1, 2);
  EXPECT_THROW(predict_proba(f, wide), ValidationError);
}

TEST(Gbdt, MissingValuesLearnDefaultDirection) {
  // Missing rows are all positive and sit with the high-x positives.
  FeatureTable t(30, 1);
  std::vector<int> y;
  for (std::size_t r = 0; r < 30; ++r) {
    if (r < 10) {
      t.at(r, 0) = std::numeric_limits<double>::quiet_NaN();
      y.push_back(1);
    } else {
      t.at(r, 0) = static_cast<double>(r);
      y.push_back(r >= 20 ? 1 : 0);
    }
  }
  GbdtConfig cfg;
  cfg.n_trees = 1;
  cfg.max_depth = 1;
  const Forest f = fit(t, y, cfg);
  const TreeNode& root = f.trees[0].nodes[0];
  EXPECT_EQ(root.threshold, 19.5);
  EXPECT_FALSE(root.default_left);
}

TEST(Gbdt, PlantedSignalRanksFirstAndRowOrderInvariance) {
  Rng rng(5);
  FeatureTable t(600, 5);
  std::vector<int> y;
  for (std::size_t r = 0; r < 600; ++r) {
    for (std::size_t c = 0; c < 5; ++c) t.at(r, c) = rng.normal();
    y.push_back(rng.bernoulli(sigmoid(3.0 * t.at(r, 2))) ? 1 : 0);
  }
  GbdtConfig cfg;
  cfg.n_trees = 50;
  cfg.max_depth = 3;
  const Forest f = fit(t, y, cfg);
  const auto imp = gain_importance(f);
  EXPECT_EQ(std::max_element(imp.begin(), imp.end()) - imp.begin(), 2);
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-9);
  for (double v : imp) EXPECT_GE(v, 0.0);
  const auto p = predict_proba(f, t);
  EXPECT_GT(roc_auc(y, p), 0.85);

  FeatureTable rev(600, 5);
  for (std::size_t r = 0; r < 600; ++r) {
    for (std::size_t c = 0; c < 5; ++c) rev.at(r, c) = t.at(599 - r, c);
  }
  const auto q = predict_proba(f, rev);
  for (std::size_t r = 0; r < 600; ++r) EXPECT_EQ(q[r], p[599 - r]);
}

TEST(Gbdt, FeaturePermutationRelabelsSplits) {
  const Dataset d = random_dataset(150, 4, 17, false);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};  // new column k holds old perm[k]
  FeatureTable t(150, 4);
  for (std::size_t r = 0; r < 150; ++r) {
    for (std::size_t k = 0; k < 4; ++k) t.at(r, k) = d.table.at(r, perm[k]);
  }
  GbdtConfig cfg;
  cfg.n_trees = 5;
  cfg.max_depth = 2;
  const Forest a = fit(d.table, d.labels, cfg), b = fit(t, d.labels, cfg);
  EXPECT_EQ(perm[static_cast<std::size_t>(b.trees[0].nodes[0].feature)],
            static_cast<std::size_t>(a.trees[0].nodes[0].feature));
  const auto pa = predict_proba(a, d.table), pb = predict_proba(b, t);
  for (std::size_t r = 0; r < 150; ++r) EXPECT_NEAR(pa[r], pb[r], 1e-12);
}

TEST(Gbdt, Validation) {
  FeatureTable t(3, 1);
  t.data = {1, 2, 3};
  const std::vector<int> one_class = {1, 1, 1};
  EXPECT_THROW(fit(t, one_class, {}), ValidationError);
  const std::vector<int> short_labels = {1, 0};
  EXPECT_THROW(fit(t, short_labels, {}), ValidationError);
  GbdtConfig cfg;
  cfg.n_trees = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  FeatureTable single(1, 1);
  const std::vector<int> y1 = {1};
  EXPECT_THROW(fit(single, y1, {}), ValidationError);
}

TEST(Gbdt, DefaultsAndJsonRoundTrip) {
  const GbdtConfig cfg;
  EXPECT_EQ(cfg.n_trees, 300);
  EXPECT_EQ(cfg.max_depth, 6);
  EXPECT_EQ(cfg.learning_rate, 0.1);
  const Dataset d = random_dataset(100, 3, 4, false);
  GbdtConfig small;
  small.n_trees = 10;
  const Forest f = fit(d.table, d.labels, small);
  const auto j = f.to_json();
  const Forest back = Forest::from_json(j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_EQ(predict_proba(back, d.table), predict_proba(f, d.table));
}

#include "oracles.hpp"

#include <wuigraph/error.hpp>
#include <wuigraph/graph.hpp>

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <tuple>

using namespace wuigraph;
using namespace wuigraph::testing;

namespace {

std::vector<FuelGrid::Sample> lattice_samples(int nx, int ny, double spacing, FuelClass fc) {
  std::vector<FuelGrid::Sample> out;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) out.push_back({{x * spacing, y * spacing}, {}, fc, {}});
  }
  return out;
}

}  // namespace

TEST(BuildGraph, MatchesBruteForceOn500Nodes) {
  const auto nodes = random_nodes(500, 900.0, 21);
  const Environment env;
  GraphSettings s;
  s.mc_samples = 20;
  auto [g, summary] = build_graph(nodes, env, Catalog::defaults(), s, {7, 1});
  const auto expect = brute_force_edges(nodes, env, s, 7);
  const auto got = edge_map(g);
  ASSERT_EQ(got.size(), expect.size());
  for (const auto& [key, w] : expect) {
    auto it = got.find(key);
    ASSERT_NE(it, got.end()) << key.first << "->" << key.second;
    EXPECT_EQ(it->second, w);
  }
  EXPECT_GT(got.size(), 0u);
  EXPECT_EQ(summary.retained_edges, g.edge_count());
}

TEST(BuildGraph, StructuralInvariants) {
  const auto nodes = random_nodes(400, 700.0, 22);
  auto [g, summary] = build_graph(nodes, {}, Catalog::defaults(), {}, {3, 2});
  ASSERT_GT(g.edge_count(), 0u);
  for (const Edge& e : g.edges()) {
    EXPECT_NE(e.source, e.target);
    EXPECT_TRUE(g.node(e.source).burnable());
    EXPECT_GE(e.weights.p_total, 0.25);
    EXPECT_GE(e.weights.p_total + 1e-12,
              std::max({e.weights.p_conv, e.weights.p_rad, e.weights.p_ember}));
  }
  EXPECT_GE(summary.min_retained_weight, 0.25);
  // Incoming lists cover every edge exactly once.
  std::size_t seen = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (auto ei : g.incoming(i)) {
      EXPECT_EQ(g.edges()[ei].target, i);
      ++seen;
    }
  }
  EXPECT_EQ(seen, g.edge_count());
}

TEST(BuildGraph, WorkerCountDoesNotChangeResult) {
  const auto nodes = random_nodes(300, 600.0, 23);
  GraphSettings s;
  s.mc_samples = 30;
  const auto ref = build_graph(nodes, {}, Catalog::defaults(), s, {5, 1}).first;
  for (unsigned w : {2u, 3u, 8u}) {
    const auto g = build_graph(nodes, {}, Catalog::defaults(), s, {5, w}).first;
    ASSERT_EQ(g.edge_count(), ref.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
      EXPECT_EQ(g.edges()[k].source, ref.edges()[k].source);
      EXPECT_EQ(g.edges()[k].target, ref.edges()[k].target);
      EXPECT_EQ(g.edges()[k].weights, ref.edges()[k].weights);
    }
  }
}

TEST(BuildGraph, InputOrderDoesNotChangeEdgeSet) {
  auto nodes = random_nodes(200, 500.0, 24);
  GraphSettings s;
  s.mc_samples = 10;
  const auto a = edge_map(build_graph(nodes, {}, Catalog::defaults(), s, {1, 1}).first);
  std::reverse(nodes.begin(), nodes.end());
  const auto b = edge_map(build_graph(nodes, {}, Catalog::defaults(), s, {1, 1}).first);
  EXPECT_EQ(a.size(), b.size());
  for (const auto& [k, w] : a) EXPECT_EQ(b.at(k), w);
}

TEST(BuildGraph, FarApartBuildingsHaveNoEdges) {
  std::vector<Node> nodes = {make_building("a", {0, 0}, Material::Wood, 150),
                             make_building("b", {500, 0}, Material::Wood, 150)};
  auto [g, summary] = build_graph(nodes, {}, Catalog::defaults(), {}, {});
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(summary.candidate_pairs, 0u);
  EXPECT_EQ(summary.min_retained_weight, 0.0);
}

TEST(BuildGraph, CoincidentPairsAreSkippedWithWarning) {
  std::vector<Node> nodes = {make_building("a", {0, 0}, Material::Wood, 150),
                             make_vegetation("v", {0, 0}, FuelClass::High),
                             make_building("c", {-5, -5}, Material::Wood, 150)};
  set_warnings_silenced(true);
  const auto before = warning_count();
  auto [g, summary] = build_graph(nodes, {}, Catalog::defaults(), {}, {});
  EXPECT_EQ(summary.degenerate_pairs, 2u);
  EXPECT_EQ(warning_count(), before + 1);
  set_warnings_silenced(false);
  for (const Edge& e : g.edges()) {
    EXPECT_NE(distance(g.node(e.source).location, g.node(e.target).location), 0.0);
  }
}

TEST(BuildGraph, RequiresABuilding) {
  std::vector<Node> nodes = {make_vegetation("v", {0, 0}, FuelClass::High)};
  EXPECT_THROW(build_graph(nodes, {}, Catalog::defaults(), {}, {}), ValidationError);
}

TEST(ContagionGraph, RejectsMalformedInput) {
  std::vector<Node> nodes = {make_building("a", {0, 0}, Material::Wood, 100),
                             make_vegetation("v", {10, 0}, FuelClass::Low)};
  EXPECT_THROW(ContagionGraph(nodes, {{0, 0, {}}}), ValidationError);
  EXPECT_THROW(ContagionGraph(nodes, {{0, 5, {}}}), ValidationError);
  SplitMasks bad;
  bad.train = {1};
  EXPECT_THROW(ContagionGraph(nodes, {}, bad), ValidationError);
  auto dup = nodes;
  dup[1].id = "a";
  EXPECT_THROW(ContagionGraph(dup, {}), ValidationError);
}

TEST(Vegetation, LatticeCountsAndDeletion) {
  const Catalog& c = Catalog::defaults();
  // 3 x 3 samples with a NonBurnable centre.
  auto samples = lattice_samples(3, 3, 30.0, FuelClass::Moderate);
  samples[4].fuel_class = FuelClass::NonBurnable;
  const FuelGrid grid(samples);
  EXPECT_EQ(discretize_vegetation(grid, grid.extent(), 30.0, c).size(), 8u);

  const FuelGrid bare(lattice_samples(3, 3, 30.0, FuelClass::NonBurnable));
  EXPECT_TRUE(discretize_vegetation(bare, bare.extent(), 30.0, c).empty());

  const FuelGrid full(lattice_samples(4, 4, 30.0, FuelClass::High));
  const Extent ninety{0, 0, 90, 90};
  const auto veg = discretize_vegetation(full, ninety, 30.0, c);
  EXPECT_EQ(veg.size(), 16u);
  for (const Node& v : veg) {
    EXPECT_EQ(v.kind, NodeKind::Vegetation);
    EXPECT_DOUBLE_EQ(v.volume, 1.0 * 900.0);
  }
  EXPECT_TRUE(discretize_vegetation(full, Extent{}, 30.0, c).empty());
}

TEST(Features, VegetationStructuralSlotsAreZero) {
  const EmbeddingField emb({{0, 0}}, {std::array<double, kEmbeddingDim>{}});
  const TerrainField ter({{0, 0}}, {std::array<double, 2>{12.0, 340.0}});
  Node v = make_vegetation("v", {3, 4}, FuelClass::High);
  v.structural.fill(9.0);
  const auto f = assemble_features(v, emb, ter, 50.0);
  for (std::size_t k = kStructuralOffset; k < kFeatureDim; ++k) EXPECT_EQ(f[k], 0.0);
  EXPECT_EQ(f[kSlopeSlot], 12.0);
  EXPECT_EQ(f[kElevationSlot], 340.0);
}

TEST(Features, NearestEmbeddingAndSlotLayout) {
  std::array<double, kEmbeddingDim> near{}, far{};
  near.fill(1.0);
  far.fill(2.0);
  const EmbeddingField emb({{5, 0}, {-12, 0}}, {near, far});
  const TerrainField ter({{0, 0}}, {std::array<double, 2>{1.0, 2.0}});
  Node b = make_building("b", {0, 0}, Material::Wood, 100);
  const auto f = assemble_features(b, emb, ter, 50.0);
  EXPECT_EQ(f[0], 1.0);
  EXPECT_EQ(f[63], 1.0);
  EXPECT_EQ(f[kStructuralOffset + static_cast<std::size_t>(StructuralSlot::Roof)], 4.1);
  Node lost = make_building("lost", {500, 500}, Material::Wood, 100);
  try {
    assemble_features(lost, emb, ter, 50.0);
    FAIL() << "expected missing-embedding error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lost"), std::string::npos);
  }
}

TEST(Features, BuildingFuelExposure) {
  auto samples = lattice_samples(5, 5, 30.0, FuelClass::Low);
  samples[7].fuel_class = FuelClass::Extreme;  // (60, 30)
  const FuelGrid grid(samples);
  GraphSettings s;
  Node b = make_building("b", {60, 10}, Material::Wood, 100);
  attach_building_fuel(b, grid, s);
  EXPECT_EQ(b.fuel_class, FuelClass::Extreme);
  EXPECT_EQ(b.structural_at(StructuralSlot::FuelExposure), 6.0);

  const FuelGrid bare(lattice_samples(3, 3, 30.0, FuelClass::NonBurnable));
  Node c = make_building("c", {30, 30}, Material::Wood, 100);
  attach_building_fuel(c, bare, s);
  EXPECT_EQ(c.fuel_class, s.building_default_fuel);
  EXPECT_EQ(c.structural_at(StructuralSlot::FuelExposure), 0.0);
}

namespace {

ContagionGraph labeled_buildings(int damaged, int survived) {
  std::vector<Node> nodes;
  for (int i = 0; i < damaged + survived; ++i) {
    Node b = make_building("b" + std::to_string(1000 + i), {i * 40.0, 0}, Material::Wood, 100);
    b.label = i < damaged ? 1 : 0;
    nodes.push_back(std::move(b));
  }
  nodes.push_back(make_vegetation("veg", {0, 30}, FuelClass::Low));
  return ContagionGraph(std::move(nodes), {});
}

}  // namespace

TEST(Split, StratifiedCountsAndPartition) {
  const ContagionGraph g = labeled_buildings(60, 40);
  const SplitMasks m = split_dataset(g, {}, 99);
  auto count = [&](const std::vector<NodeIndex>& v, int label) {
    return std::count_if(v.begin(), v.end(), [&](NodeIndex i) { return *g.node(i).label == label; });
  };
  EXPECT_NEAR(count(m.train, 1), 42, 1);
  EXPECT_NEAR(count(m.train, 0), 28, 1);
  std::set<NodeIndex> all;
  for (auto* v : {&m.train, &m.val, &m.test}) {
    EXPECT_TRUE(std::is_sorted(v->begin(), v->end()));
    for (NodeIndex i : *v) {
      EXPECT_TRUE(all.insert(i).second) << "node in two masks";
      EXPECT_TRUE(g.node(i).is_building());
    }
  }
  EXPECT_EQ(all.size(), 100u);
  const SplitMasks again = split_dataset(g, {}, 99);
  EXPECT_EQ(again.train, m.train);
  EXPECT_EQ(again.test, m.test);
}

TEST(Split, AllTrainAndErrors) {
  const ContagionGraph g = labeled_buildings(6, 6);
  const SplitMasks m = split_dataset(g, {1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(m.train.size(), 12u);
  EXPECT_TRUE(m.val.empty());
  EXPECT_TRUE(m.test.empty());
  EXPECT_THROW(split_dataset(labeled_buildings(12, 0), {}, 1), ValidationError);
  EXPECT_THROW(split_dataset(labeled_buildings(3, 4), {}, 1), ValidationError);
  EXPECT_THROW(split_dataset(g, {0.5, 0.5, 0.5}, 1), ValidationError);
}

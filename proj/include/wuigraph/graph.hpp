#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wuigraph/catalogs.hpp"
#include "wuigraph/edge_physics.hpp"
#include "wuigraph/node.hpp"
#include "wuigraph/spatial.hpp"

namespace wuigraph {

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex source = 0;
  NodeIndex target = 0;
  EdgeWeights weights;
};

/// Train/validation/test building indices, each ascending.
struct SplitMasks {
  std::vector<NodeIndex> train;
  std::vector<NodeIndex> val;
  std::vector<NodeIndex> test;

  bool empty() const { return train.empty() && val.empty() && test.empty(); }
};

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct GraphSettings {
  double candidate_radius = 200.0;  // m
  double prune_threshold = 0.25;
  int mc_samples = 100;
  double vegetation_spacing = 30.0;       // m
  double embedding_snap_distance = 50.0;  // m
  double building_fuel_radius = 30.0;     // m
  /// Fuel class for buildings with no burnable vegetation within
  /// building_fuel_radius; buildings still burn as sources.
  FuelClass building_default_fuel = FuelClass::Moderate;
};

/// Immutable pruned directed graph. Edges are ordered by (source id, target
/// id) and every node's incoming list follows that order, so the layout
/// does not depend on the order nodes were supplied in.
class ContagionGraph {
 public:
  ContagionGraph() = default;
  /// Throws ValidationError on self-edges, out-of-range indices, duplicate
  /// node ids or masks that reference non-building nodes.
  ContagionGraph(std::vector<Node> nodes, std::vector<Edge> edges, SplitMasks masks = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Edge indices into edges() whose target is `i`.
  std::span<const std::uint32_t> incoming(NodeIndex i) const;
  const SplitMasks& masks() const { return masks_; }
  std::optional<NodeIndex> index_of(const std::string& id) const;
  std::vector<NodeIndex> building_indices() const;

  /// Copy of this graph with new masks.
  ContagionGraph with_masks(SplitMasks masks) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<std::uint32_t> in_edges_;
  SplitMasks masks_;
  std::unordered_map<std::string, NodeIndex> id_index_;
};

struct BuildSummary {
  std::size_t node_count = 0;
  std::size_t burnable_sources = 0;
  std::size_t candidate_pairs = 0;
  std::size_t degenerate_pairs = 0;
  std::size_t retained_edges = 0;
  double min_retained_weight = 0.0;  // 0 when no edge survives
};

/// Axis-aligned extent in projected meters.
struct Extent {
  double min_x = 0.0, min_y = 0.0, max_x = -1.0, max_y = -1.0;

  bool empty() const { return max_x < min_x || max_y < min_y; }
  static Extent of(std::span<const GeoPoint> points);
};

/// Fuel samples (e.g. a LandFire raster exported as points).
class FuelGrid {
 public:
  struct Sample {
    GeoPoint location;
    LonLat lonlat;
    FuelClass fuel_class = FuelClass::NonBurnable;
    CanopyAttributes canopy;
  };

  explicit FuelGrid(std::vector<Sample> samples, double cell_size = 30.0);

  const std::vector<Sample>& samples() const { return samples_; }
  Extent extent() const;
  /// Nearest sample within `max_distance`, if any.
  const Sample* nearest(const GeoPoint& p, double max_distance) const;
  /// Most intense fuel class among samples within `radius`; NonBurnable
  /// when none is burnable.
  FuelClass most_intense_within(const GeoPoint& p, double radius) const;

 private:
  std::vector<Sample> samples_;
  SpatialIndex index_;
};

/// Point samples of a fixed-width vector field with nearest-sample lookup.
template <std::size_t Width>
class PointField {
 public:
  PointField(std::vector<GeoPoint> points, std::vector<std::array<double, Width>> values,
             double cell_size = 50.0);

  std::size_t size() const { return points_.size(); }
  const std::vector<GeoPoint>& points() const { return points_; }
  const std::vector<std::array<double, Width>>& values() const { return values_; }
  /// Nearest value and its distance; nullptr when the field is empty.
  std::pair<const std::array<double, Width>*, double> nearest(const GeoPoint& p) const;

 private:
  std::vector<GeoPoint> points_;
  std::vector<std::array<double, Width>> values_;
  SpatialIndex index_;
};

using EmbeddingField = PointField<kEmbeddingDim>;
using TerrainField = PointField<2>;  // slope (deg), elevation (m)

extern template class PointField<kEmbeddingDim>;
extern template class PointField<2>;

/// One vegetation node per lattice point at `spacing`, anchored at the
/// extent's minimum corner and boundary-inclusive. NonBurnable points and
/// points with no fuel sample within `spacing` are dropped.
std::vector<Node> discretize_vegetation(const FuelGrid& grid, const Extent& extent,
                                        double spacing, const Catalog& catalog);

/// Fills embedding, slope and elevation from the nearest samples and returns
/// the 74-entry feature vector. Throws ValidationError naming the node when
/// no embedding (or terrain) sample lies within `max_snap`.
std::array<double, kFeatureDim> assemble_features(Node& node, const EmbeddingField& embeddings,
                                                  const TerrainField& terrain, double max_snap);

/// Attaches fuel class, fuel exposure and canopy attributes from the fuel grid
/// to building nodes.
void attach_building_fuel(Node& building, const FuelGrid& grid, const GraphSettings& settings);

struct BuildOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Candidate pairs within the radius from every burnable source, Monte Carlo
/// weights, pruning. Output is identical for any thread count.
std::pair<ContagionGraph, BuildSummary> build_graph(std::vector<Node> nodes,
                                                    const Environment& env,
                                                    const Catalog& catalog,
                                                    const GraphSettings& settings,
                                                    const BuildOptions& options);

/// Stratified-by-label split over labeled buildings. Throws ValidationError
/// with fewer than 10 labeled buildings, a missing class, or ratios that do
/// not sum to 1.
SplitMasks split_dataset(const ContagionGraph& graph, const SplitRatios& ratios,
                         std::uint64_t seed);

}  // namespace wuigraph

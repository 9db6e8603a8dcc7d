#include "wuigraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {

// ---------------------------------------------------------------------------
// ContagionGraph

ContagionGraph::ContagionGraph(std::vector<Node> nodes, std::vector<Edge> edges,
                               SplitMasks masks)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), masks_(std::move(masks)) {
  id_index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!id_index_.emplace(nodes_[i].id, static_cast<NodeIndex>(i)).second) {
      throw ValidationError("graph: duplicate node id '" + nodes_[i].id + "'");
    }
  }
  for (const Edge& e : edges_) {
    if (e.source >= nodes_.size() || e.target >= nodes_.size()) {
      throw ValidationError("graph: edge references a missing node");
    }
    if (e.source == e.target) {
      throw ValidationError("graph: self-edge at '" + nodes_[e.source].id + "'");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [this](const Edge& a, const Edge& b) {
    const auto& sa = nodes_[a.source].id;
    const auto& sb = nodes_[b.source].id;
    if (sa != sb) return sa < sb;
    return nodes_[a.target].id < nodes_[b.target].id;
  });

  in_offsets_.assign(nodes_.size() + 1, 0);
  for (const Edge& e : edges_) ++in_offsets_[e.target + 1];
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  in_edges_.resize(edges_.size());
  std::vector<std::uint32_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    in_edges_[cursor[edges_[k].target]++] = static_cast<std::uint32_t>(k);
  }

  for (auto* mask : {&masks_.train, &masks_.val, &masks_.test}) {
    std::sort(mask->begin(), mask->end());
    for (NodeIndex i : *mask) {
      if (i >= nodes_.size() || !nodes_[i].is_building()) {
        throw ValidationError("graph: split mask references a non-building node");
      }
    }
  }
}

std::span<const std::uint32_t> ContagionGraph::incoming(NodeIndex i) const {
  return {in_edges_.data() + in_offsets_.at(i), in_edges_.data() + in_offsets_.at(i + 1)};
}

std::optional<NodeIndex> ContagionGraph::index_of(const std::string& id) const {
  if (auto it = id_index_.find(id); it != id_index_.end()) return it->second;
  return std::nullopt;
}

std::vector<NodeIndex> ContagionGraph::building_indices() const {
  std::vector<NodeIndex> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_building()) out.push_back(static_cast<NodeIndex>(i));
  }
  return out;
}

ContagionGraph ContagionGraph::with_masks(SplitMasks masks) const {
  ContagionGraph g = *this;
  for (auto* mask : {&masks.train, &masks.val, &masks.test}) {
    std::sort(mask->begin(), mask->end());
    for (NodeIndex i : *mask) {
      if (i >= nodes_.size() || !nodes_[i].is_building()) {
        throw ValidationError("graph: split mask references a non-building node");
      }
    }
  }
  g.masks_ = std::move(masks);
  return g;
}

// ---------------------------------------------------------------------------
// Sources

Extent Extent::of(std::span<const GeoPoint> points) {
  Extent e;
  if (points.empty()) return e;
  e.min_x = e.max_x = points[0].x;
  e.min_y = e.max_y = points[0].y;
  for (const auto& p : points) {
    e.min_x = std::min(e.min_x, p.x);
    e.max_x = std::max(e.max_x, p.x);
    e.min_y = std::min(e.min_y, p.y);
    e.max_y = std::max(e.max_y, p.y);
  }
  return e;
}

namespace {

template <typename T, typename F>
std::vector<GeoPoint> locations(const std::vector<T>& items, F get) {
  std::vector<GeoPoint> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(get(it));
  return out;
}

}  // namespace

FuelGrid::FuelGrid(std::vector<Sample> samples, double cell_size)
    : samples_(std::move(samples)),
      index_(locations(samples_, [](const Sample& s) { return s.location; }), cell_size) {}

Extent FuelGrid::extent() const {
  return Extent::of(locations(samples_, [](const Sample& s) { return s.location; }));
}

const FuelGrid::Sample* FuelGrid::nearest(const GeoPoint& p, double max_distance) const {
  auto [id, d] = index_.nearest(p);
  if (id < 0 || d > max_distance) return nullptr;
  return &samples_[static_cast<std::size_t>(id)];
}

FuelClass FuelGrid::most_intense_within(const GeoPoint& p, double radius) const {
  FuelClass best = FuelClass::NonBurnable;
  for (auto id : index_.radius_query(p, radius)) {
    const FuelClass c = samples_[id].fuel_class;
    if (intensity_rank(c) > intensity_rank(best)) best = c;
  }
  return best;
}

template <std::size_t Width>
PointField<Width>::PointField(std::vector<GeoPoint> points,
                              std::vector<std::array<double, Width>> values, double cell_size)
    : points_(std::move(points)), values_(std::move(values)), index_(points_, cell_size) {
  if (points_.size() != values_.size()) {
    throw ValidationError("point field: location and value counts differ");
  }
}

template <std::size_t Width>
std::pair<const std::array<double, Width>*, double> PointField<Width>::nearest(
    const GeoPoint& p) const {
  auto [id, d] = index_.nearest(p);
  if (id < 0) return {nullptr, d};
  return {&values_[static_cast<std::size_t>(id)], d};
}

template class PointField<kEmbeddingDim>;
template class PointField<2>;

// ---------------------------------------------------------------------------
// Node discretization and features

std::vector<Node> discretize_vegetation(const FuelGrid& grid, const Extent& extent,
                                        double spacing, const Catalog& catalog) {
  if (!(spacing > 0.0)) throw ValidationError("vegetation spacing must be > 0");
  std::vector<Node> out;
  if (extent.empty() || grid.samples().empty()) return out;
  const auto count = [&](double span) {
    return static_cast<std::int64_t>(std::floor(span / spacing + 1e-9)) + 1;
  };
  const std::int64_t nx = count(extent.max_x - extent.min_x);
  const std::int64_t ny = count(extent.max_y - extent.min_y);
  const double cell_area = spacing * spacing;
  for (std::int64_t iy = 0; iy < ny; ++iy) {
    for (std::int64_t ix = 0; ix < nx; ++ix) {
      const GeoPoint p{extent.min_x + static_cast<double>(ix) * spacing,
                       extent.min_y + static_cast<double>(iy) * spacing};
      const FuelGrid::Sample* s = grid.nearest(p, spacing);
      if (s == nullptr || !is_burnable(s->fuel_class)) continue;
      Node n;
      n.id = "veg_" + std::to_string(ix) + "_" + std::to_string(iy);
      n.kind = NodeKind::Vegetation;
      n.location = p;
      n.lonlat = s->lonlat;
      n.fuel_class = s->fuel_class;
      n.material = Material::Vegetation;
      n.area = cell_area;
      n.volume = catalog.vegetation_volume(s->fuel_class, cell_area);
      n.canopy = s->canopy;
      out.push_back(std::move(n));
    }
  }
  return out;
}

std::array<double, kFeatureDim> assemble_features(Node& node, const EmbeddingField& embeddings,
                                                  const TerrainField& terrain, double max_snap) {
  auto [emb, d_emb] = embeddings.nearest(node.location);
  if (emb == nullptr || d_emb > max_snap) {
    throw ValidationError("missing embedding for node '" + node.id + "' (nearest sample " +
                          (emb ? std::to_string(d_emb) + " m" : std::string("absent")) +
                          ", snap limit " + std::to_string(max_snap) + " m)");
  }
  auto [ter, d_ter] = terrain.nearest(node.location);
  if (ter == nullptr || d_ter > max_snap) {
    throw ValidationError("missing terrain for node '" + node.id + "'");
  }
  node.embedding = *emb;
  node.slope = (*ter)[0];
  node.elevation = (*ter)[1];
  if (!node.is_building()) node.structural.fill(0.0);
  auto f = node.features();
  for (double v : f) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature on node '" + node.id + "'");
  }
  return f;
}

void attach_building_fuel(Node& building, const FuelGrid& grid, const GraphSettings& settings) {
  const FuelClass nearby = grid.most_intense_within(building.location, settings.building_fuel_radius);
  building.structural[static_cast<std::size_t>(StructuralSlot::FuelExposure)] =
      static_cast<double>(intensity_rank(nearby));
  building.fuel_class = is_burnable(nearby) ? nearby : settings.building_default_fuel;
  if (const auto* s = grid.nearest(building.location, settings.building_fuel_radius)) {
    building.canopy = s->canopy;
  }
}

// ---------------------------------------------------------------------------
// Graph construction

std::pair<ContagionGraph, BuildSummary> build_graph(std::vector<Node> nodes,
                                                    const Environment& env,
                                                    const Catalog& catalog,
                                                    const GraphSettings& settings,
                                                    const BuildOptions& options) {
  env.validate();
  if (std::none_of(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_building(); })) {
    throw ValidationError("build_graph: at least one building node is required");
  }
  if (!(settings.candidate_radius > 0.0) || settings.mc_samples < 1) {
    throw ValidationError("build_graph: invalid graph settings");
  }
  const auto points = locations(nodes, [](const Node& n) { return n.location; });
  const SpatialIndex index(points, settings.candidate_radius);

  struct Partial {
    std::vector<Edge> edges;
    std::size_t sources = 0, candidates = 0, degenerate = 0;
  };
  const unsigned workers = std::max(1u, options.threads);
  std::vector<Partial> partials(workers);
  auto work = [&](unsigned w) {
    Partial& out = partials[w];
    for (std::size_t i = w; i < nodes.size(); i += workers) {
      const Node& src = nodes[i];
      if (!src.burnable()) continue;
      ++out.sources;
      for (auto j : index.radius_query(src.location, settings.candidate_radius,
                                       static_cast<std::int64_t>(i))) {
        ++out.candidates;
        if (points[i] == points[j]) {
          ++out.degenerate;
          continue;
        }
        const EdgeWeights wts =
            monte_carlo_edge(src, nodes[j], env, catalog, settings.mc_samples, options.seed);
        if (wts.p_total >= settings.prune_threshold) {
          out.edges.push_back({static_cast<NodeIndex>(i), j, wts});
        }
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  BuildSummary summary;
  summary.node_count = nodes.size();
  std::vector<Edge> edges;
  for (auto& p : partials) {
    summary.burnable_sources += p.sources;
    summary.candidate_pairs += p.candidates;
    summary.degenerate_pairs += p.degenerate;
    edges.insert(edges.end(), p.edges.begin(), p.edges.end());
  }
  if (summary.degenerate_pairs > 0) {
    warn("build_graph: skipped " + std::to_string(summary.degenerate_pairs) +
         " coincident node pairs");
  }
  summary.retained_edges = edges.size();
  if (!edges.empty()) {
    summary.min_retained_weight = std::min_element(edges.begin(), edges.end(), [](auto& a, auto& b) {
                                    return a.weights.p_total < b.weights.p_total;
                                  })->weights.p_total;
  }
  return {ContagionGraph(std::move(nodes), std::move(edges)), summary};
}

SplitMasks split_dataset(const ContagionGraph& graph, const SplitRatios& ratios,
                         std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::fabs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be non-negative and sum to 1");
  }
  std::array<std::vector<NodeIndex>, 2> by_class;
  for (NodeIndex i : graph.building_indices()) {
    const Node& n = graph.node(i);
    if (n.label) by_class[static_cast<std::size_t>(*n.label != 0)].push_back(i);
  }
  if (by_class[0].size() + by_class[1].size() < 10) {
    throw ValidationError("split_dataset: at least 10 labeled buildings are required");
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw ValidationError("split_dataset: stratification needs both damage classes");
  }
  SplitMasks masks;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    // Canonical order first so the split depends on ids, not input order.
    std::sort(members.begin(), members.end(), [&](NodeIndex a, NodeIndex b) {
      return graph.node(a).id < graph.node(b).id;
    });
    Rng rng(mix_seed(seed, c + 1));
    rng.shuffle(members.begin(), members.end());
    const auto n = static_cast<double>(members.size());
    const auto n_train = std::min(members.size(), static_cast<std::size_t>(std::llround(n * ratios.train)));
    const auto n_val = std::min(members.size() - n_train,
                                static_cast<std::size_t>(std::llround(n * ratios.val)));
    masks.train.insert(masks.train.end(), members.begin(), members.begin() + n_train);
    masks.val.insert(masks.val.end(), members.begin() + n_train, members.begin() + n_train + n_val);
    masks.test.insert(masks.test.end(), members.begin() + n_train + n_val, members.end());
  }
  for (auto* m : {&masks.train, &masks.val, &masks.test}) std::sort(m->begin(), m->end());
  return masks;
}

}  // namespace wuigraph

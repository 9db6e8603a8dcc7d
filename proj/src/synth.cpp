#include "wuigraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wuigraph/config.hpp"
#include "wuigraph/diagnostics.hpp"
#include "wuigraph/error.hpp"
#include "wuigraph/io.hpp"
#include "wuigraph/pipeline.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr LonLat kOrigin{-118.10, 34.19};
constexpr double kFuelPitch = 30.0;
constexpr double kPi = 3.14159265358979323846;

enum Stream : std::uint64_t { kLayout = 1, kFields, kFuel, kStructure, kLabels, kBayes };

/// Smooth scalar field: sum of random cosines with wavelengths in
/// [min_wavelength, max_wavelength]; marginal variance ~1.
class FourierField {
 public:
  FourierField(Rng& rng, int terms, double min_wavelength, double max_wavelength) {
    for (int j = 0; j < terms; ++j) {
      const double lambda = rng.uniform(min_wavelength, max_wavelength);
      const double dir = rng.uniform(0.0, 2.0 * kPi);
      const double k = 2.0 * kPi / lambda;
      waves_.push_back({k * std::cos(dir), k * std::sin(dir), rng.uniform(0.0, 2.0 * kPi)});
    }
    scale_ = std::sqrt(2.0 / terms);
  }

  double operator()(const GeoPoint& p) const {
    double s = 0.0;
    for (const auto& w : waves_) s += std::cos(w[0] * p.x + w[1] * p.y + w[2]);
    return scale_ * s;
  }

 private:
  std::vector<std::array<double, 3>> waves_;
  double scale_ = 1.0;
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> standardize(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / n);
  for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
  return v;
}

std::string num(double v) { return format_double(v); }

/// Rounds coordinates so the CSV text is short and the projection error
/// stays below a millimetre.
double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

struct Town {
  double x0, y0, side;  // south-west corner and side length
  double outside_distance(const GeoPoint& p) const {
    const double dx = std::max({x0 - p.x, 0.0, p.x - (x0 + side)});
    const double dy = std::max({y0 - p.y, 0.0, p.y - (y0 + side)});
    return std::hypot(dx, dy);
  }
};

FuelClass class_from_intensity(double v) {
  if (v < 0.6) return FuelClass::VeryLow;
  if (v < 1.4) return FuelClass::Low;
  if (v < 2.3) return FuelClass::Moderate;
  if (v < 3.2) return FuelClass::High;
  if (v < 4.1) return FuelClass::VeryHigh;
  return FuelClass::Extreme;
}

template <class Pick>
std::string choose(Rng& rng, double logit_shift, Pick pick) {
  return pick(rng.uniform(), sigmoid(logit_shift));
}

}  // namespace

SynthConfig SynthConfig::structural_signal(std::uint64_t seed) {
  SynthConfig c;
  c.environmental_strength = 0.3;
  c.structural_strength = 4.0;
  c.contagion_strength = 0.0;
  c.suppression_efficacy = 0.0;
  c.hardening = 0.0;
  c.label_noise = 0.02;
  c.seed = seed;
  return c;
}

void SynthConfig::validate() const {
  if (n_buildings < 10) throw ValidationError("synth: n_buildings must be >= 10");
  if (!(extent > 0.0) || !(lot_spacing > 0.0)) throw ValidationError("synth: extent and lot_spacing must be > 0");
  if (environmental_strength < 0.0 || structural_strength < 0.0 || contagion_strength < 0.0 ||
      hardening < 0.0) {
    throw ValidationError("synth: strengths must be >= 0");
  }
  if (!(suppression_efficacy >= 0.0 && suppression_efficacy <= 1.0)) {
    throw ValidationError("synth: suppression_efficacy must lie in [0, 1]");
  }
  if (!std::isfinite(suppression_threshold)) throw ValidationError("synth: suppression_threshold must be finite");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) throw ValidationError("synth: label_noise must lie in [0, 0.5)");
  if (!(damage_rate > 0.0 && damage_rate < 1.0)) throw ValidationError("synth: damage_rate must lie in (0, 1)");
}

json SynthConfig::to_json() const {
  return {{"n_buildings", n_buildings},
          {"extent", extent},
          {"lot_spacing", lot_spacing},
          {"environmental_strength", environmental_strength},
          {"structural_strength", structural_strength},
          {"contagion_strength", contagion_strength},
          {"suppression_threshold", suppression_threshold},
          {"suppression_efficacy", suppression_efficacy},
          {"hardening", hardening},
          {"label_noise", label_noise},
          {"damage_rate", damage_rate},
          {"seed", seed}};
}

SynthTruth generate(const SynthConfig& cfg, const fs::path& dir, unsigned threads) {
  cfg.validate();
  const LocalProjection proj(kOrigin);
  const double half = cfg.extent / 2.0;

  // Town on a square block of lots, pushed south-west so the wildland band
  // upwind (north-east, the wind blows toward 225 degrees) is widest.
  const int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_buildings))));
  const double margin = 0.08 * cfg.extent;
  const Town town{-half + margin, -half + margin, k * cfg.lot_spacing};
  constexpr double kMaxArea = 320.0;
  if (town.x0 + town.side > half - std::max(150.0, 0.2 * cfg.extent) || cfg.lot_spacing < 1.5 * std::sqrt(kMaxArea)) {
    throw ValidationError("synth: " + std::to_string(cfg.n_buildings) + " buildings at " +
                          num(cfg.lot_spacing) + " m lots do not fit a " + num(cfg.extent) +
                          " m extent without overlap");
  }

  Rng fields_rng(mix_seed(cfg.seed, kFields));
  std::vector<FourierField> fields;
  // 0-3 carry the risk subspace, 4-11 drive the remaining embedding dims
  // through a low-rank loading, 12 is elevation and 13 fuel texture.
  constexpr int kBackground = 8;
  for (int f = 0; f < 4 + kBackground + 2; ++f) fields.emplace_back(fields_rng, 8, 250.0, 700.0);
  const FourierField& env_field = fields[0];
  const FourierField& elevation_field = fields[4 + kBackground];
  const FourierField& fuel_noise = fields[4 + kBackground + 1];
  std::vector<std::array<double, kBackground>> loading(kEmbeddingDim - 4);
  for (auto& row : loading) {
    for (double& v : row) v = fields_rng.normal() / std::sqrt(static_cast<double>(kBackground));
  }
  Rng texture_rng(mix_seed(cfg.seed, kFields + 100));
  // Orthonormal mixing of the first four fields into embedding dims 0-3;
  // env = u . e[0:4] with u the first column.
  double mix[4][4];
  {
    double a[4][4];
    for (auto& row : a) for (double& v : row) v = fields_rng.normal();
    for (int c = 0; c < 4; ++c) {
      for (int p = 0; p < c; ++p) {
        double d = 0.0;
        for (int r = 0; r < 4; ++r) d += a[r][c] * a[r][p];
        for (int r = 0; r < 4; ++r) a[r][c] -= d * a[r][p];
      }
      double nrm = 0.0;
      for (int r = 0; r < 4; ++r) nrm += a[r][c] * a[r][c];
      nrm = std::sqrt(nrm);
      for (int r = 0; r < 4; ++r) a[r][c] /= nrm;
    }
    std::copy(&a[0][0], &a[0][0] + 16, &mix[0][0]);
  }
  auto embedding_at = [&](const GeoPoint& p) {
    std::array<double, kEmbeddingDim> e{};
    double g[4];
    for (int i = 0; i < 4; ++i) g[i] = fields[i](p);
    for (int r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c) s += mix[r][c] * g[c];
      e[r] = s;
    }
    std::array<double, kBackground> b;
    for (int j = 0; j < kBackground; ++j) b[j] = fields[4 + j](p);
    for (std::size_t d = 4; d < kEmbeddingDim; ++d) {
      double s = 0.0;
      for (int j = 0; j < kBackground; ++j) s += loading[d - 4][j] * b[j];
      e[d] = 0.5 * s + 0.05 * texture_rng.normal();
    }
    return e;
  };
  auto elevation_at = [&](const GeoPoint& p) {
    return 250.0 + 0.04 * (p.x + p.y) + 35.0 * elevation_field(p);
  };

  // Lattice shared by the fuel grid, embeddings and terrain.
  std::vector<GeoPoint> lattice;
  const int nl = static_cast<int>(std::floor(cfg.extent / kFuelPitch + 1e-9)) + 1;
  for (int iy = 0; iy < nl; ++iy) {
    for (int ix = 0; ix < nl; ++ix) lattice.push_back({-half + ix * kFuelPitch, -half + iy * kFuelPitch});
  }

  // Fuel: wildland intensity grows with distance outside the town and toward
  // the north-east; the town itself carries light fuel and bare lots.
  Rng fuel_rng(mix_seed(cfg.seed, kFuel));
  std::vector<FuelClass> fuel(lattice.size());
  std::vector<CanopyAttributes> canopy(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const GeoPoint& p = lattice[i];
    const double out = town.outside_distance(p);
    const double upwind = (p.x + p.y) / cfg.extent;  // -1 south-west .. 1 north-east
    double intensity;
    if (out <= 0.0) {
      intensity = 2.0 + 0.5 * fuel_noise(p) + 0.25 * fuel_rng.normal();
      fuel[i] = fuel_rng.bernoulli(0.06) ? FuelClass::NonBurnable : class_from_intensity(intensity);
    } else {
      intensity = 1.4 + std::min(out, 150.0) / 60.0 + 1.1 * upwind + 0.45 * env_field(p) +
                  0.35 * fuel_noise(p) + 0.25 * fuel_rng.normal();
      const bool bare = fuel_noise(p) > 1.6;  // rock outcrops and reservoirs
      fuel[i] = bare ? FuelClass::NonBurnable : class_from_intensity(intensity);
    }
    const int rank = intensity_rank(fuel[i]);
    if (rank >= 3 && !fuel_rng.bernoulli(0.05)) {
      canopy[i].cbd = round_to(0.02 * rank + 0.02 * fuel_rng.uniform(), 1e-4);
      canopy[i].cbh = round_to(0.5 + 0.4 * rank * fuel_rng.uniform(), 1e-3);
      canopy[i].ch = round_to(4.0 + 3.0 * rank + 4.0 * fuel_rng.uniform(), 1e-3);
      canopy[i].cd = round_to(std::min(95.0, 15.0 * rank + 20.0 * fuel_rng.uniform()), 1e-3);
    }
  }
  const SpatialIndex fuel_index(lattice, 100.0);

  // Buildings on jittered lots.
  Rng layout_rng(mix_seed(cfg.seed, kLayout));
  std::vector<int> lots(static_cast<std::size_t>(k) * k);
  std::iota(lots.begin(), lots.end(), 0);
  layout_rng.shuffle(lots.begin(), lots.end());
  lots.resize(cfg.n_buildings);
  std::sort(lots.begin(), lots.end());
  struct Building {
    std::string id;
    GeoPoint p;
    LonLat ll;
    double area;
    std::string type;
  };
  std::vector<Building> buildings;
  for (int idx = 0; idx < cfg.n_buildings; ++idx) {
    const int lot = lots[idx];
    const double jitter = 0.18 * cfg.lot_spacing;
    GeoPoint p{town.x0 + (lot % k + 0.5) * cfg.lot_spacing + layout_rng.uniform(-jitter, jitter),
               town.y0 + (lot / k + 0.5) * cfg.lot_spacing + layout_rng.uniform(-jitter, jitter)};
    const double u = layout_rng.uniform();
    std::string type = u < 0.8 ? "single_residence" : u < 0.9 ? "multi_residence" : u < 0.95 ? "commercial" : "outbuilding";
    double area = round_to(type == "outbuilding" ? layout_rng.uniform(20.0, 60.0)
                                                 : layout_rng.uniform(90.0, kMaxArea), 0.1);
    char id[16];
    std::snprintf(id, sizeof id, "b%04d", idx);
    LonLat ll = proj.inverse(p);
    ll = {round_to(ll.lon, 1e-8), round_to(ll.lat, 1e-8)};
    buildings.push_back({id, proj.forward(ll), ll, area, type});
  }

  // Structure: a latent vulnerability, lowered where wildland exposure is high.
  std::vector<double> exposure;
  for (const auto& b : buildings) {
    double s = 0.0;
    std::size_t n = 0;
    for (auto id : fuel_index.radius_query(b.p, 100.0)) {
      s += intensity_rank(fuel[id]);
      ++n;
    }
    exposure.push_back(n ? s / n : 0.0);
  }
  const auto exposure_z = standardize(exposure);
  Rng st_rng(mix_seed(cfg.seed, kStructure));
  struct Attributes {
    std::string roof, siding, eaves, vent, window, deck, fence;
    double eaves_score;
  };
  std::vector<Attributes> attrs;
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const double z = st_rng.normal() - cfg.hardening * exposure_z[i];
    Attributes a;
    if (z < -0.6) {
      a.eaves = st_rng.bernoulli(0.5) ? "composite" : "masonry_concrete";
      a.eaves_score = 0.3;
    } else if (z < 0.35) {
      a.eaves = "none";
      a.eaves_score = 2.0;
    } else {
      a.eaves = "wood";
      a.eaves_score = 2.7;
    }
    const double w = 0.6 * z;  // weak coupling of the other attributes
    a.roof = choose(st_rng, w - 1.5, [](double u, double p) {
      return u < p ? "wood" : u < p + (1 - p) * 0.5 ? "asphalt" : u < p + (1 - p) * 0.8 ? "tile" : "metal";
    });
    a.siding = choose(st_rng, w, [](double u, double p) {
      return u < p * 0.7 ? "Wood" : u < p ? "Vinyl" : "Stucco";
    });
    a.vent = choose(st_rng, w, [](double u, double p) {
      return u < p ? (u < 0.5 * p ? "no_screen" : "mesh_gt_4mm") : u < p + (1 - p) * 0.8 ? "mesh_lt_4mm" : "no_vents";
    });
    a.window = choose(st_rng, w - 0.5, [](double u, double p) { return u < p ? "single_pane" : "multi_pane"; });
    a.deck = choose(st_rng, w, [](double u, double p) {
      return u < p ? "wood" : u < p + (1 - p) * 0.5 ? "composite" : "none";
    });
    a.fence = choose(st_rng, w, [](double u, double p) {
      return u < p ? "combustible" : u < p + (1 - p) * 0.5 ? "non_combustible" : "none";
    });
    attrs.push_back(std::move(a));
  }

  auto write_buildings = [&](const std::vector<std::string>* damage) {
    std::ostringstream os;
    os << "id,lon,lat,area_m2,building_type,roof,siding,eaves,vent_screen,window,deck_porch,fence";
    if (damage) os << ",damage";
    os << '\n';
    for (std::size_t i = 0; i < buildings.size(); ++i) {
      const auto& b = buildings[i];
      const auto& a = attrs[i];
      os << b.id << ',' << num(b.ll.lon) << ',' << num(b.ll.lat) << ',' << num(b.area) << ',' << b.type
         << ',' << a.roof << ',' << a.siding << ',' << a.eaves << ',' << a.vent << ',' << a.window << ','
         << a.deck << ',' << a.fence;
      if (damage) os << ',' << (*damage)[i];
      os << '\n';
    }
    write_text(dir / kBuildingsFile, os.str());
  };

  fs::create_directories(dir);
  write_buildings(nullptr);
  {
    std::ostringstream fuel_csv, emb_csv, ter_csv;
    fuel_csv << "x,y,fuel_class,cbd,cbh,ch,cd\n";
    emb_csv << "lon,lat";
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) emb_csv << ",e" << d;
    emb_csv << '\n';
    ter_csv << "lon,lat,slope_deg,elevation_m\n";
    auto opt = [](double v) { return std::isnan(v) ? std::string() : num(v); };
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      LonLat ll = proj.inverse(lattice[i]);
      ll = {round_to(ll.lon, 1e-8), round_to(ll.lat, 1e-8)};
      const GeoPoint p = proj.forward(ll);
      const std::string coords = num(ll.lon) + "," + num(ll.lat);
      const auto& c = canopy[i];
      fuel_csv << coords << ',' << to_string(fuel[i]) << ',' << opt(c.cbd) << ',' << opt(c.cbh) << ','
               << opt(c.ch) << ',' << opt(c.cd) << '\n';
      emb_csv << coords;
      for (double v : embedding_at(p)) emb_csv << ',' << num(round_to(v, 1e-6));
      emb_csv << '\n';
      const double h = 1.0;
      const double gx = (elevation_at({p.x + h, p.y}) - elevation_at({p.x - h, p.y})) / (2 * h);
      const double gy = (elevation_at({p.x, p.y + h}) - elevation_at({p.x, p.y - h})) / (2 * h);
      const double slope = std::atan(std::hypot(gx, gy)) * 180.0 / kPi;
      ter_csv << coords << ',' << num(round_to(slope, 1e-4)) << ',' << num(round_to(elevation_at(p), 1e-3))
              << '\n';
    }
    write_text(dir / kFuelGridFile, fuel_csv.str());
    write_text(dir / kEmbeddingsFile, emb_csv.str());
    write_text(dir / kTerrainFile, ter_csv.str());
  }

  // Neighbor pressure from the graph the pipeline itself would build.
  ScenarioConfig sc;
  sc.seed = cfg.seed;
  const Scenario scenario = load_scenario(dir, sc.catalog());
  const PreparedGraph prepared = prepare_graph(scenario, sc, threads);
  std::vector<double> pressure, env, eaves;
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const auto idx = prepared.graph.index_of(buildings[i].id);
    pressure.push_back(degree_centrality(prepared.graph, *idx));
    env.push_back(env_field(buildings[i].p));
    eaves.push_back(attrs[i].eaves_score);
  }
  const auto pressure_z = standardize(pressure);
  const auto env_z = standardize(env);
  const auto eaves_z = standardize(eaves);

  std::vector<double> signal(buildings.size());
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    signal[i] = cfg.environmental_strength * env_z[i] + cfg.structural_strength * eaves_z[i] +
                cfg.contagion_strength * pressure_z[i];
  }
  std::vector<double> saved(buildings.size());
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    saved[i] = cfg.suppression_efficacy * sigmoid(4.0 * (pressure_z[i] - cfg.suppression_threshold));
  }
  double lo = -30.0, hi = 30.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double m = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) m += sigmoid(mid + signal[i]) * (1.0 - saved[i]);
    (m / signal.size() < cfg.damage_rate ? lo : hi) = mid;
  }
  const double bias = 0.5 * (lo + hi);

  Rng label_rng(mix_seed(cfg.seed, kLabels));
  const std::array<const char*, 4> damaged_names = {"Affected (1-9%)", "Minor (10-25%)",
                                                    "Major (26-50%)", "Destroyed (>50%)"};
  std::vector<double> prob(buildings.size());
  std::vector<int> labels(buildings.size());
  std::vector<std::string> damage(buildings.size());
  SynthTruth truth;
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const double p = sigmoid(bias + signal[i]) * (1.0 - saved[i]);
    prob[i] = (1.0 - cfg.label_noise) * p + cfg.label_noise * (1.0 - p);
    int y = label_rng.bernoulli(p) ? 1 : 0;
    if (label_rng.bernoulli(cfg.label_noise)) y = 1 - y;
    labels[i] = y;
    damage[i] = y ? damaged_names[label_rng.below(4)] : "No Damage";
    truth.damaged += static_cast<std::size_t>(y);
  }
  write_buildings(&damage);

  Rng bayes_rng(mix_seed(cfg.seed, kBayes));
  constexpr int kReplicates = 200;
  double auc_sum = 0.0;
  int auc_n = 0;
  std::vector<int> draw(prob.size());
  for (int r = 0; r < kReplicates; ++r) {
    for (std::size_t i = 0; i < prob.size(); ++i) draw[i] = bayes_rng.bernoulli(prob[i]) ? 1 : 0;
    const auto pos = std::count(draw.begin(), draw.end(), 1);
    if (pos == 0 || pos == static_cast<long>(draw.size())) continue;
    auc_sum += roc_auc(draw, prob);
    ++auc_n;
  }
  truth.bayes_auc = auc_n ? auc_sum / auc_n : 0.5;
  truth.damage_rate = static_cast<double>(truth.damaged) / static_cast<double>(buildings.size());

  json rows = json::array();
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    rows.push_back({buildings[i].id, env_z[i], eaves_z[i], pressure_z[i], exposure_z[i], bias + signal[i],
                    prob[i], labels[i], saved[i]});
  }
  truth.record = {
      {"config", cfg.to_json()},
      {"bayes_auc", truth.bayes_auc},
      {"damage_rate", truth.damage_rate},
      {"bias", bias},
      {"env_direction", {mix[0][0], mix[1][0], mix[2][0], mix[3][0]}},
      {"fields", {"id", "env", "eaves", "pressure", "exposure", "logit", "label_probability", "label", "suppression"}},
      {"buildings", rows},
  };
  write_json(dir / kTruthFile, truth.record);
  return truth;
}

ContagionGraph separable_graph(int n, std::uint64_t seed) {
  if (n < 10) throw ValidationError("separable_graph: n must be >= 10");
  Rng rng(mix_seed(seed, 0x5e9));
  std::vector<Node> nodes(static_cast<std::size_t>(n));
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  for (int i = 0; i < n; ++i) {
    Node& v = nodes[i];
    char id[16];
    std::snprintf(id, sizeof id, "s%03d", i);
    v.id = id;
    v.kind = NodeKind::Building;
    v.location = {10.0 * (i % side), 10.0 * (i / side)};
    v.fuel_class = FuelClass::Moderate;
    v.area = 100.0;
    v.volume = 500.0;
    for (double& e : v.embedding) e = rng.normal();
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return nodes[a].embedding[0] < nodes[b].embedding[0]; });
  std::array<std::vector<int>, 2> members;
  for (int r = 0; r < n; ++r) {
    const int label = r >= n / 2 ? 1 : 0;
    nodes[order[r]].label = label;
    members[label].push_back(order[r]);
  }
  for (auto& m : members) std::sort(m.begin(), m.end());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const auto& pool = members[*nodes[i].label];
    std::vector<int> others;
    for (int j : pool) {
      if (j != i) others.push_back(j);
    }
    rng.shuffle(others.begin(), others.end());
    const std::size_t k = std::min<std::size_t>(3, others.size());
    for (std::size_t t = 0; t < k; ++t) {
      EdgeWeights w;
      w.p_conv = rng.uniform(0.0, 1.0);
      w.p_rad = rng.uniform(0.0, 0.5);
      w.p_ember = rng.uniform(0.25, 1.0);
      w.p_total = total_probability(w.p_conv, w.p_rad, w.p_ember);
      edges.push_back({static_cast<NodeIndex>(others[t]), static_cast<NodeIndex>(i), w});
    }
  }
  SplitMasks masks;
  for (int i = 0; i < n; ++i) masks.train.push_back(static_cast<NodeIndex>(i));
  return ContagionGraph(std::move(nodes), std::move(edges), std::move(masks));
}

}  // namespace wuigraph

#include "wuigraph/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

using nlohmann::json;

/// Reads optional keys from one object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config: '" + where() + "' must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ValidationError("config: unknown key '" + join(key) + "'");
    }
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ValidationError("config: '" + join(key) + "' must be a number");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError("config: '" + join(key) + "' must be an integer");
      out = v->get<int>();
    }
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        throw ValidationError("config: '" + join(key) + "' must be a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ValidationError("config: '" + join(key) + "' must be a boolean");
      out = v->get<bool>();
    }
  }

  void range(const char* key, Range& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ValidationError("config: '" + join(key) + "' must be a [lo, hi] pair");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  template <class Enum, std::size_t N>
  void choice(const char* key, Enum& out, const std::array<std::pair<const char*, Enum>, N>& names) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        for (const auto& [name, value] : names) {
          if (v->get<std::string>() == name) {
            out = value;
            return;
          }
        }
      }
      std::string allowed;
      for (const auto& [name, _] : names) allowed += std::string(allowed.empty() ? "" : ", ") + name;
      throw ValidationError("config: '" + join(key) + "' must be one of " + allowed);
    }
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr std::array<std::pair<const char*, RadiationMode>, 2> kRadiationModes = {{
    {"paper_literal", RadiationMode::PaperLiteral}, {"monotone", RadiationMode::Monotone}}};
constexpr std::array<std::pair<const char*, RadiationArea>, 2> kRadiationAreas = {{
    {"target", RadiationArea::Target}, {"source", RadiationArea::Source}}};
constexpr std::array<std::pair<const char*, HeadActivation>, 2> kActivations = {{
    {"relu", HeadActivation::Relu}, {"elu", HeadActivation::Elu}}};

template <class Enum, std::size_t N>
const char* name_of(Enum v, const std::array<std::pair<const char*, Enum>, N>& names) {
  for (const auto& [name, value] : names) {
    if (value == v) return name;
  }
  return names[0].first;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  physics.validate();
  require(graph.candidate_radius > 0.0, "graph.candidate_radius must be > 0");
  require(graph.prune_threshold >= 0.0 && graph.prune_threshold <= 1.0,
          "graph.prune_threshold must lie in [0, 1]");
  require(graph.mc_samples >= 1, "graph.mc_samples must be >= 1");
  require(graph.vegetation_spacing > 0.0, "graph.vegetation_spacing must be > 0");
  require(graph.embedding_snap_distance > 0.0, "graph.embedding_snap_distance must be > 0");
  require(graph.building_fuel_radius >= 0.0, "graph.building_fuel_radius must be >= 0");
  require(split.train >= 0.0 && split.val >= 0.0 && split.test >= 0.0 &&
              std::fabs(split.train + split.val + split.test - 1.0) < 1e-9,
          "split ratios must be non-negative and sum to 1");
  gnn_architecture.validate();
  gnn.validate();
  gbdt.validate();
  require(stacker.decision_threshold > 0.0 && stacker.decision_threshold < 1.0,
          "stacker.decision_threshold must lie in (0, 1)");
  require(stacker.max_iterations >= 1, "stacker.max_iterations must be >= 1");
  require(stacker.gradient_tolerance > 0.0, "stacker.gradient_tolerance must be > 0");
  (void)catalog();
}

Catalog ScenarioConfig::catalog() const {
  Catalog c;
  if (!catalog_overrides.empty()) c.apply_overrides(catalog_overrides);
  return c;
}

nlohmann::json ScenarioConfig::to_json() const {
  const auto& e = physics.ember;
  return json{
      {"version", kVersion},
      {"seed", seed},
      {"physics",
       {{"wind_speed", physics.wind_speed},
        {"wind_direction", physics.wind_direction},
        {"ambient_temperature", {physics.ambient_temperature.lo, physics.ambient_temperature.hi}},
        {"gravity", physics.gravity},
        {"stefan_boltzmann", physics.stefan_boltzmann},
        {"emissivity", physics.emissivity},
        {"d_th_radiation", physics.d_th_radiation},
        {"radiation_area", name_of(physics.radiation_area, kRadiationAreas)},
        {"ember",
         {{"v_ref", e.v_ref},
          {"lambda0", e.lambda0},
          {"volume_ref", e.volume_ref},
          {"volume_exponent", e.volume_exponent},
          {"radiation_timing_sigma", e.radiation_timing_sigma},
          {"radiation_mode", name_of(e.radiation_mode, kRadiationModes)}}}}},
      {"graph",
       {{"candidate_radius", graph.candidate_radius},
        {"prune_threshold", graph.prune_threshold},
        {"mc_samples", graph.mc_samples},
        {"vegetation_spacing", graph.vegetation_spacing},
        {"embedding_snap_distance", graph.embedding_snap_distance},
        {"building_fuel_radius", graph.building_fuel_radius},
        {"building_default_fuel", std::string(to_string(graph.building_default_fuel))}}},
      {"split", {{"train", split.train}, {"val", split.val}, {"test", split.test}}},
      {"gnn",
       {{"heads", gnn_architecture.heads},
        {"head_dim", gnn_architecture.head_dim},
        {"mlp_hidden1", gnn_architecture.mlp_hidden1},
        {"mlp_hidden2", gnn_architecture.mlp_hidden2},
        {"leaky_slope", gnn_architecture.leaky_slope},
        {"activation", name_of(gnn_architecture.activation, kActivations)},
        {"lr", gnn.lr},
        {"weight_decay", gnn.weight_decay},
        {"gat_dropout", gnn.gat_dropout},
        {"mlp_dropout", gnn.mlp_dropout},
        {"epochs", gnn.epochs},
        {"patience", gnn.patience},
        {"lr_decay", gnn.lr_decay},
        {"lr_decay_factor", gnn.lr_decay_factor},
        {"lr_decay_every", gnn.lr_decay_every}}},
      {"gbdt",
       {{"n_trees", gbdt.n_trees},
        {"max_depth", gbdt.max_depth},
        {"learning_rate", gbdt.learning_rate},
        {"min_child_weight", gbdt.min_child_weight},
        {"lambda_reg", gbdt.lambda_reg},
        {"gamma_split", gbdt.gamma_split}}},
      {"stacker",
       {{"decision_threshold", stacker.decision_threshold},
        {"max_iterations", stacker.max_iterations},
        {"gradient_tolerance", stacker.gradient_tolerance}}},
      {"catalog_overrides", catalog_overrides},
  };
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  {
    Section root(j, "");
    if (const json* v = root.find("version")) {
      if (!v->is_number_integer() || v->get<int>() != kVersion) {
        throw ValidationError("config: unsupported version (expected " + std::to_string(kVersion) + ")");
      }
    }
    root.unsigned64("seed", c.seed);
    if (const json* p = root.find("physics")) {
      Section s(*p, "physics");
      s.number("wind_speed", c.physics.wind_speed);
      s.number("wind_direction", c.physics.wind_direction);
      s.range("ambient_temperature", c.physics.ambient_temperature);
      s.number("gravity", c.physics.gravity);
      s.number("stefan_boltzmann", c.physics.stefan_boltzmann);
      s.number("emissivity", c.physics.emissivity);
      s.number("d_th_radiation", c.physics.d_th_radiation);
      s.choice("radiation_area", c.physics.radiation_area, kRadiationAreas);
      if (const json* e = s.find("ember")) {
        Section es(*e, "physics.ember");
        auto& ep = c.physics.ember;
        es.number("v_ref", ep.v_ref);
        es.number("lambda0", ep.lambda0);
        es.number("volume_ref", ep.volume_ref);
        es.number("volume_exponent", ep.volume_exponent);
        es.number("radiation_timing_sigma", ep.radiation_timing_sigma);
        es.choice("radiation_mode", ep.radiation_mode, kRadiationModes);
      }
    }
    if (const json* g = root.find("graph")) {
      Section s(*g, "graph");
      s.number("candidate_radius", c.graph.candidate_radius);
      s.number("prune_threshold", c.graph.prune_threshold);
      s.integer("mc_samples", c.graph.mc_samples);
      s.number("vegetation_spacing", c.graph.vegetation_spacing);
      s.number("embedding_snap_distance", c.graph.embedding_snap_distance);
      s.number("building_fuel_radius", c.graph.building_fuel_radius);
      if (const json* f = s.find("building_default_fuel")) {
        auto parsed = f->is_string() ? parse_fuel_class(f->get<std::string>()) : std::nullopt;
        if (!parsed) throw ValidationError("config: 'graph.building_default_fuel' must name a fuel class");
        c.graph.building_default_fuel = *parsed;
      }
    }
    if (const json* sp = root.find("split")) {
      Section s(*sp, "split");
      s.number("train", c.split.train);
      s.number("val", c.split.val);
      s.number("test", c.split.test);
    }
    if (const json* g = root.find("gnn")) {
      Section s(*g, "gnn");
      s.integer("heads", c.gnn_architecture.heads);
      s.integer("head_dim", c.gnn_architecture.head_dim);
      s.integer("mlp_hidden1", c.gnn_architecture.mlp_hidden1);
      s.integer("mlp_hidden2", c.gnn_architecture.mlp_hidden2);
      s.number("leaky_slope", c.gnn_architecture.leaky_slope);
      s.choice("activation", c.gnn_architecture.activation, kActivations);
      s.number("lr", c.gnn.lr);
      s.number("weight_decay", c.gnn.weight_decay);
      s.number("gat_dropout", c.gnn.gat_dropout);
      s.number("mlp_dropout", c.gnn.mlp_dropout);
      s.integer("epochs", c.gnn.epochs);
      s.integer("patience", c.gnn.patience);
      s.boolean("lr_decay", c.gnn.lr_decay);
      s.number("lr_decay_factor", c.gnn.lr_decay_factor);
      s.integer("lr_decay_every", c.gnn.lr_decay_every);
    }
    if (const json* g = root.find("gbdt")) {
      Section s(*g, "gbdt");
      s.integer("n_trees", c.gbdt.n_trees);
      s.integer("max_depth", c.gbdt.max_depth);
      s.number("learning_rate", c.gbdt.learning_rate);
      s.number("min_child_weight", c.gbdt.min_child_weight);
      s.number("lambda_reg", c.gbdt.lambda_reg);
      s.number("gamma_split", c.gbdt.gamma_split);
    }
    if (const json* st = root.find("stacker")) {
      Section s(*st, "stacker");
      s.number("decision_threshold", c.stacker.decision_threshold);
      s.integer("max_iterations", c.stacker.max_iterations);
      s.number("gradient_tolerance", c.stacker.gradient_tolerance);
    }
    if (const json* o = root.find("catalog_overrides")) {
      if (!o->is_object()) throw ValidationError("config: 'catalog_overrides' must be an object");
      c.catalog_overrides = *o;
    }
  }
  c.validate();
  return c;
}

std::string ScenarioConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

std::uint64_t ScenarioConfig::graph_seed() const { return mix_seed(seed, 0x67726170); }
std::uint64_t ScenarioConfig::split_seed() const { return mix_seed(seed, 0x73706c74); }
std::uint64_t ScenarioConfig::gnn_seed() const { return mix_seed(seed, 0x676e6e); }
std::uint64_t ScenarioConfig::gbdt_seed() const { return mix_seed(seed, 0x67626474); }

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return ScenarioConfig::from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (in '" + path + "')");
  }
}

}  // namespace wuigraph

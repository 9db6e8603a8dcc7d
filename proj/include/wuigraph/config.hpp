#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "wuigraph/catalogs.hpp"
#include "wuigraph/edge_physics.hpp"
#include "wuigraph/gat.hpp"
#include "wuigraph/gbdt.hpp"
#include "wuigraph/graph.hpp"

namespace wuigraph {

struct StackerSettings {
  double decision_threshold = 0.5;  // triage flags and confusion counts
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

/// Every tunable of a run. Component seeds are derived from `seed`.
struct ScenarioConfig {
  static constexpr int kVersion = 1;

  std::uint64_t seed = 0;
  Environment physics;
  GraphSettings graph;
  SplitRatios split;
  GatArchitecture gnn_architecture;
  TrainConfig gnn;
  GbdtConfig gbdt;
  StackerSettings stacker;
  nlohmann::json catalog_overrides = nlohmann::json::object();

  /// Throws ValidationError naming the first offending field.
  void validate() const;
  /// Defaults merged with overrides.
  Catalog catalog() const;

  /// Complete document (every key present).
  nlohmann::json to_json() const;
  /// Accepts any subset of keys; unknown keys are rejected with their path.
  static ScenarioConfig from_json(const nlohmann::json& j);

  /// Hex FNV-1a of the canonical to_json() dump.
  std::string hash() const;

  std::uint64_t graph_seed() const;
  std::uint64_t split_seed() const;
  std::uint64_t gnn_seed() const;
  std::uint64_t gbdt_seed() const;
};

ScenarioConfig load_config(const std::string& path);

}  // namespace wuigraph

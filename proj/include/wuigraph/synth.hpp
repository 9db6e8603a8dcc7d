#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wuigraph/graph.hpp"

namespace wuigraph {

/// Generative model of a synthetic WUI community. Damage labels follow
/// Bernoulli(sigmoid(bias + w_e*env + w_s*eaves + w_c*pressure)) with each
/// label then flipped with probability label_noise. env, eaves and pressure
/// are standardized over the buildings; pressure is the degree centrality of
/// the building in the graph built from the generated files.
struct SynthConfig {
  int n_buildings = 1000;
  double extent = 1600.0;          // m, square side
  double lot_spacing = 30.0;       // m, street-grid pitch
  double environmental_strength = 7.0;
  double structural_strength = 1.5;
  double contagion_strength = 0.5;
  /// Crews concentrate on the most pressured buildings: a building is
  /// defended with probability sigmoid(4 (pressure - threshold)) and a
  /// defended building that would have burned survives with probability
  /// efficacy. Zero efficacy disables suppression.
  double suppression_threshold = 0.75;
  double suppression_efficacy = 0.8;
  /// Mean shift of the structural latent per unit of standardized wildland
  /// exposure. Positive values make exposed owners harden their homes.
  double hardening = 0.8;
  double label_noise = 0.02;
  double damage_rate = 0.45;  // target mean of the clean label probability
  std::uint64_t seed = 0;

  /// Signal carried almost entirely by the eaves score.
  static SynthConfig structural_signal(std::uint64_t seed = 0);

  /// Throws ValidationError on out-of-domain fields.
  void validate() const;
  nlohmann::json to_json() const;
};

struct SynthTruth {
  double bayes_auc = 0.0;  // expected AUC of the label probabilities
  double damage_rate = 0.0;
  std::size_t damaged = 0;
  nlohmann::json record;  // the truth.json document
};

/// Writes buildings.csv, fuel_grid.csv, embeddings.csv, terrain.csv and
/// truth.json into `dir`. Same config, same bytes. Throws ValidationError
/// when the buildings do not fit the extent at the requested lot spacing.
SynthTruth generate(const SynthConfig& cfg, const std::filesystem::path& dir, unsigned threads = 1);

/// Tiny all-building graph whose labels threshold embedding coordinate 0 at
/// its median. Every node has three in-edges from same-label nodes, so the
/// label is recoverable from the neighborhood. All nodes are in the train
/// mask.
ContagionGraph separable_graph(int n, std::uint64_t seed);

}  // namespace wuigraph

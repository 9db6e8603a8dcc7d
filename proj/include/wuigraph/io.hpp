#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wuigraph/catalogs.hpp"
#include "wuigraph/diagnostics.hpp"
#include "wuigraph/ensemble.hpp"
#include "wuigraph/gat.hpp"
#include "wuigraph/gbdt.hpp"
#include "wuigraph/graph.hpp"

namespace wuigraph {

/// Header plus string cells. Blank lines are skipped; `line` keeps the
/// 1-based source line of each row for error messages.
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;

  /// Column index, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws ValidationError naming the file when absent.
  std::size_t require_column(std::string_view name) const;
  /// Parses a finite double; errors carry file, line and column.
  double number(std::size_t row, std::size_t col) const;
};

/// Plain comma-separated values with optional double quotes around cells.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

struct FuelRecord {
  LonLat lonlat;
  FuelClass fuel_class = FuelClass::NonBurnable;
  CanopyAttributes canopy;
};

struct EmbeddingRecord {
  LonLat lonlat;
  std::array<double, kEmbeddingDim> values{};
};

struct TerrainRecord {
  LonLat lonlat;
  double slope = 0.0;      // degrees
  double elevation = 0.0;  // m
};

/// Damage string to binary label: "no damage" -> 0; affected, minor,
/// major, destroyed -> 1. Empty -> unlabeled. Anything else -> nullopt with
/// `ok` false.
std::optional<int> parse_damage(std::string_view s, bool& ok);

/// Buildings with lon/lat, structural scores, area and volume filled in.
/// Locations stay unset until the scenario is projected.
std::vector<Node> load_buildings(const std::filesystem::path& path, const Catalog& catalog);
/// x, y are longitude and latitude; cbd, cbh, ch, cd columns are optional.
std::vector<FuelRecord> load_fuel_grid(const std::filesystem::path& path);
std::vector<EmbeddingRecord> load_embeddings(const std::filesystem::path& path);
std::vector<TerrainRecord> load_terrain(const std::filesystem::path& path);

struct Scenario {
  std::vector<Node> buildings;
  std::vector<FuelRecord> fuel;
  std::vector<EmbeddingRecord> embeddings;
  std::vector<TerrainRecord> terrain;
};

inline constexpr const char* kBuildingsFile = "buildings.csv";
inline constexpr const char* kFuelGridFile = "fuel_grid.csv";
inline constexpr const char* kEmbeddingsFile = "embeddings.csv";
inline constexpr const char* kTerrainFile = "terrain.csv";
inline constexpr const char* kTruthFile = "truth.json";

Scenario load_scenario(const std::filesystem::path& dir, const Catalog& catalog);

nlohmann::json node_to_json(const Node& n);
Node node_from_json(const nlohmann::json& j);

nlohmann::json graph_to_json(const ContagionGraph& g, const std::string& config_hash);
/// Validates the format tag; returns the stored config hash through
/// `config_hash` when non-null.
ContagionGraph graph_from_json(const nlohmann::json& j, std::string* config_hash = nullptr);

struct ModelBundle {
  static constexpr int kVersion = 1;

  GatParams gat;
  Forest forest;
  StackerCoefficients stacker;
  std::string config_hash;

  nlohmann::json to_json() const;
  /// Throws ValidationError on a version mismatch, or when `expected_hash`
  /// is given and differs from the stored one.
  static ModelBundle from_json(const nlohmann::json& j,
                               const std::optional<std::string>& expected_hash = std::nullopt);
};

/// Pretty-printed with a trailing newline so reruns are byte-identical.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

struct TriageRecord {
  std::string id;
  LonLat lonlat;
  double p_gnn = 0.0;
  double p_xgb = 0.0;
  double p_stack = 0.0;
  TriageQuadrant quadrant = TriageQuadrant::Safe;
};

std::string triage_csv(const std::vector<TriageRecord>& records);
nlohmann::json triage_geojson(const std::vector<TriageRecord>& records);
std::string confusion_csv(const MetricsReport& report);

}  // namespace wuigraph

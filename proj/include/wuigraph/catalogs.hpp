#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wuigraph {

class Rng;

enum class FuelClass { VeryLow, Low, Moderate, High, VeryHigh, Extreme, NonBurnable };

inline constexpr std::array<FuelClass, 7> kAllFuelClasses = {
    FuelClass::VeryLow,  FuelClass::Low,     FuelClass::Moderate,   FuelClass::High,
    FuelClass::VeryHigh, FuelClass::Extreme, FuelClass::NonBurnable};

std::string_view to_string(FuelClass c);
/// Accepts the canonical names ("VeryHigh", "NonBurnable") and spaced or
/// hyphenated variants, case-insensitively.
std::optional<FuelClass> parse_fuel_class(std::string_view s);
/// 0 for NonBurnable, then 1 (VeryLow) .. 6 (Extreme).
int intensity_rank(FuelClass c);
inline bool is_burnable(FuelClass c) { return c != FuelClass::NonBurnable; }

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(Rng& rng) const;
  friend bool operator==(const Range&, const Range&) = default;
};

struct FlameParamRanges {
  Range flame_length;       // m
  Range residence_time;     // s
  Range flame_temperature;  // K
  double fuel_depth = 0.0;  // m
};

enum class Material { Wood, Vinyl, StuccoBrickCement, Vegetation, Unknown };

inline constexpr std::array<Material, 5> kAllMaterials = {
    Material::Wood, Material::Vinyl, Material::StuccoBrickCement, Material::Vegetation,
    Material::Unknown};

std::string_view to_string(Material m);
/// Siding strings: "stucco", "brick", "cement" and combinations map to
/// StuccoBrickCement; anything unrecognized maps to Unknown.
Material parse_material(std::string_view s);

struct MaterialProps {
  Material material = Material::Unknown;
  Range q_critical;   // kW/m^2
  Range ftp;          // kW*s/m^2
  Range ftp_index_n;  // dimensionless
};

enum class StructuralFeature { DeckPorch, Eaves, Roof, VentScreen, Fence, Window };

inline constexpr std::array<StructuralFeature, 6> kAllStructuralFeatures = {
    StructuralFeature::DeckPorch, StructuralFeature::Eaves, StructuralFeature::Roof,
    StructuralFeature::VentScreen, StructuralFeature::Fence, StructuralFeature::Window};

std::string_view to_string(StructuralFeature f);
std::optional<StructuralFeature> parse_structural_feature(std::string_view s);

enum class BuildingType { SingleResidence, MultiResidence, Commercial, Outbuilding, Unknown };

std::string_view to_string(BuildingType t);
/// Keyword-based: "Single Family Residence Multi Story" -> MultiResidence.
BuildingType parse_building_type(std::string_view s);

/// Lowercase, trimmed, with runs of blanks, '-' and '_' collapsed to '_'.
std::string normalize_key(std::string_view s);

/// Per-feature score table with an alias vocabulary and a fallback variant
/// for strings that do not resolve.
struct FeatureScoreTable {
  struct Entry {
    std::vector<std::pair<std::string, double>> scores;  // canonical variant -> score
    std::map<std::string, std::string> aliases;          // normalized alias -> canonical
    std::string fallback;
  };
  std::array<Entry, 6> entries;

  const Entry& entry(StructuralFeature f) const { return entries[static_cast<int>(f)]; }
  Entry& entry(StructuralFeature f) { return entries[static_cast<int>(f)]; }
};

/// Every lookup table the physics and feature encoding need. Defaults are
/// built in; a JSON override document can replace any subset.
class Catalog {
 public:
  Catalog();

  static const Catalog& defaults();

  const FlameParamRanges& fuel_class_params(FuelClass c) const;
  const MaterialProps& material_props(Material m) const;

  /// Resolves `variant` through the alias vocabulary. Unknown strings map to
  /// the feature's fallback entry and emit a warning.
  double feature_score(StructuralFeature f, std::string_view variant) const;
  /// Canonical variant for `variant`, or nullopt when it does not resolve.
  std::optional<std::string> resolve_variant(StructuralFeature f, std::string_view variant) const;
  double fallback_score(StructuralFeature f) const;
  /// Largest score across all features (4.1 with the default table).
  double max_feature_score() const;

  double siding_score(Material m) const;
  double building_height(BuildingType t) const;

  /// height(type) * area. Throws ValidationError for area <= 0.
  double building_volume(double area_m2, BuildingType t) const;
  /// fuel_depth(c) * cell_area (30 m x 30 m by default).
  double vegetation_volume(FuelClass c, double cell_area_m2 = 900.0) const;

  const FeatureScoreTable& feature_table() const { return features_; }

  nlohmann::json to_json() const;
  static Catalog from_json(const nlohmann::json& j);
  /// Merges a partial override document over this catalog. Unknown keys are
  /// rejected with ValidationError.
  void apply_overrides(const nlohmann::json& overrides);

 private:
  std::array<FlameParamRanges, 7> fuel_;
  std::array<MaterialProps, 5> materials_;
  FeatureScoreTable features_;
  std::array<double, 5> siding_scores_;
  std::array<double, 5> heights_;
};

}  // namespace wuigraph

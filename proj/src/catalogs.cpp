#include "wuigraph/catalogs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 7> kFuelNames = {
    "VeryLow", "Low", "Moderate", "High", "VeryHigh", "Extreme", "NonBurnable"};
constexpr std::array<std::string_view, 5> kMaterialNames = {
    "Wood", "Vinyl", "StuccoBrickCement", "Vegetation", "Unknown"};
constexpr std::array<std::string_view, 6> kFeatureNames = {
    "deck_porch", "eaves", "roof", "vent_screen", "fence", "window"};
constexpr std::array<std::string_view, 5> kBuildingTypeNames = {
    "single_residence", "multi_residence", "commercial", "outbuilding", "unknown"};

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

template <std::size_t N>
int index_of(const std::array<std::string_view, N>& names, std::string_view name,
             const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw ValidationError(std::string("catalog: unknown ") + what + " '" + std::string(name) + "'");
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(std::string("catalog: ") + what + " must be a [lo, hi] pair");
  }
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo <= r.hi) || r.lo < 0.0) {
    throw ValidationError(std::string("catalog: ") + what + " needs 0 <= lo <= hi");
  }
  return r;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ValidationError("catalog: " + where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("catalog: unknown key '" + key + "' in " + where);
    }
  }
}

FeatureScoreTable default_feature_table() {
  FeatureScoreTable t;
  auto& deck = t.entry(StructuralFeature::DeckPorch);
  deck.scores = {{"composite", 0.3}, {"masonry_concrete", 0.3}, {"wood", 2.7}, {"none", 2.0}};
  deck.fallback = "none";
  auto& eaves = t.entry(StructuralFeature::Eaves);
  eaves.scores = deck.scores;
  eaves.fallback = "none";
  for (auto* e : {&deck, &eaves}) {
    e->aliases = {{"masonry", "masonry_concrete"},
                  {"concrete", "masonry_concrete"},
                  {"masonry_or_concrete", "masonry_concrete"},
                  {"masonry_concrete", "masonry_concrete"},
                  {"enclosed", "composite"},
                  {"unenclosed", "wood"},
                  {"no_deck_porch", "none"},
                  {"no_deck", "none"},
                  {"unknown", "none"}};
  }
  auto& roof = t.entry(StructuralFeature::Roof);
  roof.scores = {{"wood", 4.1},  {"composite", 0.7}, {"tile", 0.3}, {"concrete", 0.3},
                 {"metal", 0.3}, {"asphalt", 0.7},   {"other", 1.0}};
  roof.fallback = "other";
  roof.aliases = {{"wood_shake", "wood"}, {"shake", "wood"}, {"shingle", "asphalt"},
                  {"asphalt_shingle", "asphalt"}, {"clay_tile", "tile"}, {"unknown", "other"}};
  auto& vent = t.entry(StructuralFeature::VentScreen);
  vent.scores = {{"mesh_lt_4mm", 0.7}, {"mesh_gt_4mm", 1.2}, {"no_vents", 1.1}, {"no_screen", 1.5}};
  vent.fallback = "no_screen";
  vent.aliases = {{"mesh_<_4mm", "mesh_lt_4mm"}, {"mesh_<4mm", "mesh_lt_4mm"},
                  {"<4mm", "mesh_lt_4mm"},       {"fine_mesh", "mesh_lt_4mm"},
                  {"mesh_>_4mm", "mesh_gt_4mm"}, {"mesh_>4mm", "mesh_gt_4mm"},
                  {">4mm", "mesh_gt_4mm"},       {"coarse_mesh", "mesh_gt_4mm"},
                  {"none", "no_vents"},          {"no_vent", "no_vents"},
                  {"unscreened", "no_screen"},   {"unknown", "no_screen"}};
  auto& fence = t.entry(StructuralFeature::Fence);
  fence.scores = {{"combustible", 1.8}, {"non_combustible", 1.1}, {"none", 0.7}};
  fence.fallback = "none";
  fence.aliases = {{"noncombustible", "non_combustible"}, {"wood", "combustible"},
                   {"vinyl", "combustible"}, {"metal", "non_combustible"},
                   {"masonry", "non_combustible"}, {"no_fence", "none"}, {"unknown", "none"}};
  auto& window = t.entry(StructuralFeature::Window);
  window.scores = {{"multi_pane", 0.4}, {"single_pane", 3.0}};
  window.fallback = "single_pane";
  window.aliases = {{"multipane", "multi_pane"}, {"double_pane", "multi_pane"},
                    {"dual_pane", "multi_pane"}, {"single", "single_pane"},
                    {"multi", "multi_pane"}, {"unknown", "single_pane"}};
  return t;
}

}  // namespace

std::string_view to_string(FuelClass c) { return kFuelNames[static_cast<int>(c)]; }

std::optional<FuelClass> parse_fuel_class(std::string_view s) {
  const std::string key = lower_alnum(s);
  for (std::size_t i = 0; i < kFuelNames.size(); ++i) {
    if (lower_alnum(kFuelNames[i]) == key) return static_cast<FuelClass>(i);
  }
  if (key == "nb" || key == "nonburnable") return FuelClass::NonBurnable;
  return std::nullopt;
}

int intensity_rank(FuelClass c) {
  return c == FuelClass::NonBurnable ? 0 : static_cast<int>(c) + 1;
}

double Range::sample(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }

std::string_view to_string(Material m) { return kMaterialNames[static_cast<int>(m)]; }

Material parse_material(std::string_view s) {
  const std::string key = lower_alnum(s);
  if (key.empty()) return Material::Unknown;
  if (contains(key, "stucco") || contains(key, "brick") || contains(key, "cement") ||
      contains(key, "masonry") || contains(key, "concrete")) {
    return Material::StuccoBrickCement;
  }
  if (contains(key, "vinyl")) return Material::Vinyl;
  if (contains(key, "wood")) return Material::Wood;
  if (contains(key, "vegetation")) return Material::Vegetation;
  return Material::Unknown;
}

std::string_view to_string(StructuralFeature f) { return kFeatureNames[static_cast<int>(f)]; }

std::optional<StructuralFeature> parse_structural_feature(std::string_view s) {
  const std::string key = normalize_key(s);
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == key) return static_cast<StructuralFeature>(i);
  }
  return std::nullopt;
}

std::string_view to_string(BuildingType t) { return kBuildingTypeNames[static_cast<int>(t)]; }

BuildingType parse_building_type(std::string_view s) {
  const std::string key = lower_alnum(s);
  if (key.empty()) return BuildingType::Unknown;
  for (std::size_t i = 0; i < kBuildingTypeNames.size(); ++i) {
    if (lower_alnum(kBuildingTypeNames[i]) == key) return static_cast<BuildingType>(i);
  }
  if (contains(key, "outbuilding") || contains(key, "shed") || contains(key, "garage") ||
      contains(key, "barn")) {
    return BuildingType::Outbuilding;
  }
  if (contains(key, "commercial") || contains(key, "mixed") || contains(key, "school") ||
      contains(key, "church")) {
    return BuildingType::Commercial;
  }
  if (contains(key, "multi")) return BuildingType::MultiResidence;
  if (contains(key, "resid") || contains(key, "home") || contains(key, "house") ||
      contains(key, "mobile")) {
    return BuildingType::SingleResidence;
  }
  return BuildingType::Unknown;
}

std::string normalize_key(std::string_view s) {
  std::string out;
  bool pending_sep = false;
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '-' || c == '_') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

Catalog::Catalog()
    : fuel_{{
          {{0.0, 0.3048}, {20, 40}, {750, 850}, 0.1},
          {{0.3048, 1.219}, {40, 80}, {850, 1000}, 0.3},
          {{1.219, 2.438}, {120, 300}, {1000, 1500}, 0.6},
          // High's lower flame length is printed as 2.348 in the source table
          // (below Moderate's upper bound); kept verbatim.
          {{2.348, 3.658}, {300, 600}, {1150, 1250}, 1.0},
          {{3.658, 7.620}, {600, 1200}, {1250, 1350}, 1.5},
          {{7.620, 15.24}, {1200, 2400}, {1350, 1450}, 2.0},
          {{0.0, 0.0}, {0.0, 0.0}, {293, 293}, 0.0},
      }},
      materials_{{
          {Material::Wood, {8.5, 13.7}, {5130, 6164}, {1.5, 1.53}},
          {Material::Vinyl, {14, 16}, {4800, 5400}, {1.45, 1.55}},
          {Material::StuccoBrickCement, {10000, 10000}, {20000, 20000}, {1.0, 1.0}},
          {Material::Vegetation, {10, 15}, {300, 1200}, {1.0, 1.25}},
          {Material::Unknown, {30, 40}, {6000, 8000}, {1.5, 1.5}},
      }},
      features_(default_feature_table()),
      siding_scores_{2.7, 1.8, 0.3, 0.0, 2.0},
      heights_{5.0, 8.0, 10.0, 3.0, 5.0} {}

const Catalog& Catalog::defaults() {
  static const Catalog instance;
  return instance;
}

const FlameParamRanges& Catalog::fuel_class_params(FuelClass c) const {
  return fuel_[static_cast<int>(c)];
}

const MaterialProps& Catalog::material_props(Material m) const {
  return materials_[static_cast<int>(m)];
}

std::optional<std::string> Catalog::resolve_variant(StructuralFeature f,
                                                    std::string_view variant) const {
  const auto& e = features_.entry(f);
  const std::string key = normalize_key(variant);
  for (const auto& [name, _] : e.scores) {
    if (name == key) return name;
  }
  if (auto it = e.aliases.find(key); it != e.aliases.end()) return it->second;
  return std::nullopt;
}

double Catalog::fallback_score(StructuralFeature f) const {
  const auto& e = features_.entry(f);
  for (const auto& [name, score] : e.scores) {
    if (name == e.fallback) return score;
  }
  throw ValidationError("catalog: fallback variant missing for " + std::string(to_string(f)));
}

double Catalog::feature_score(StructuralFeature f, std::string_view variant) const {
  const auto& e = features_.entry(f);
  if (auto name = resolve_variant(f, variant)) {
    for (const auto& [n, score] : e.scores) {
      if (n == *name) return score;
    }
  }
  warn("unrecognized " + std::string(to_string(f)) + " variant '" + std::string(variant) +
       "', using '" + e.fallback + "'");
  return fallback_score(f);
}

double Catalog::max_feature_score() const {
  double best = 0.0;
  for (const auto& e : features_.entries) {
    for (const auto& [_, score] : e.scores) best = std::max(best, score);
  }
  return best;
}

double Catalog::siding_score(Material m) const { return siding_scores_[static_cast<int>(m)]; }

double Catalog::building_height(BuildingType t) const { return heights_[static_cast<int>(t)]; }

double Catalog::building_volume(double area_m2, BuildingType t) const {
  if (!(area_m2 > 0.0) || !std::isfinite(area_m2)) {
    throw ValidationError("building area must be positive");
  }
  return building_height(t) * area_m2;
}

double Catalog::vegetation_volume(FuelClass c, double cell_area_m2) const {
  return fuel_class_params(c).fuel_depth * cell_area_m2;
}

nlohmann::json Catalog::to_json() const {
  json j;
  json fuel = json::object();
  for (FuelClass c : kAllFuelClasses) {
    const auto& p = fuel_class_params(c);
    fuel[std::string(to_string(c))] = {{"flame_length", range_json(p.flame_length)},
                                       {"residence_time", range_json(p.residence_time)},
                                       {"flame_temperature", range_json(p.flame_temperature)},
                                       {"fuel_depth", p.fuel_depth}};
  }
  j["fuel_classes"] = fuel;
  json mats = json::object();
  for (Material m : kAllMaterials) {
    const auto& p = material_props(m);
    mats[std::string(to_string(m))] = {{"q_critical", range_json(p.q_critical)},
                                       {"ftp", range_json(p.ftp)},
                                       {"ftp_index_n", range_json(p.ftp_index_n)},
                                       {"siding_score", siding_score(m)}};
  }
  j["materials"] = mats;
  json feats = json::object();
  for (StructuralFeature f : kAllStructuralFeatures) {
    const auto& e = features_.entry(f);
    json scores = json::object();
    for (const auto& [name, score] : e.scores) scores[name] = score;
    feats[std::string(to_string(f))] = {
        {"scores", scores}, {"aliases", e.aliases}, {"fallback", e.fallback}};
  }
  j["feature_scores"] = feats;
  json heights = json::object();
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    heights[std::string(kBuildingTypeNames[i])] = heights_[i];
  }
  j["building_heights"] = heights;
  return j;
}

Catalog Catalog::from_json(const nlohmann::json& j) {
  Catalog c;
  c.apply_overrides(j);
  return c;
}

void Catalog::apply_overrides(const nlohmann::json& o) {
  reject_unknown_keys(o, {"fuel_classes", "materials", "feature_scores", "building_heights"},
                      "catalog overrides");
  if (o.contains("fuel_classes")) {
    for (const auto& [name, v] : o.at("fuel_classes").items()) {
      auto& p = fuel_[index_of(kFuelNames, name, "fuel class")];
      reject_unknown_keys(v, {"flame_length", "residence_time", "flame_temperature", "fuel_depth"},
                          "fuel_classes." + name);
      if (v.contains("flame_length")) p.flame_length = range_from(v.at("flame_length"), "flame_length");
      if (v.contains("residence_time")) p.residence_time = range_from(v.at("residence_time"), "residence_time");
      if (v.contains("flame_temperature")) p.flame_temperature = range_from(v.at("flame_temperature"), "flame_temperature");
      if (v.contains("fuel_depth")) {
        p.fuel_depth = v.at("fuel_depth").get<double>();
        if (p.fuel_depth < 0.0) throw ValidationError("catalog: fuel_depth must be >= 0");
      }
    }
  }
  if (o.contains("materials")) {
    for (const auto& [name, v] : o.at("materials").items()) {
      const int idx = index_of(kMaterialNames, name, "material");
      auto& p = materials_[idx];
      reject_unknown_keys(v, {"q_critical", "ftp", "ftp_index_n", "siding_score"},
                          "materials." + name);
      if (v.contains("q_critical")) p.q_critical = range_from(v.at("q_critical"), "q_critical");
      if (v.contains("ftp")) p.ftp = range_from(v.at("ftp"), "ftp");
      if (v.contains("ftp_index_n")) p.ftp_index_n = range_from(v.at("ftp_index_n"), "ftp_index_n");
      if (v.contains("siding_score")) siding_scores_[idx] = v.at("siding_score").get<double>();
      if (!(p.q_critical.lo > 0.0)) throw ValidationError("catalog: q_critical must be > 0");
    }
  }
  if (o.contains("feature_scores")) {
    for (const auto& [name, v] : o.at("feature_scores").items()) {
      auto& e = features_.entries[index_of(kFeatureNames, name, "structural feature")];
      reject_unknown_keys(v, {"scores", "aliases", "fallback"}, "feature_scores." + name);
      if (v.contains("scores")) {
        for (const auto& [variant, score] : v.at("scores").items()) {
          const std::string key = normalize_key(variant);
          auto it = std::find_if(e.scores.begin(), e.scores.end(),
                                 [&](const auto& p) { return p.first == key; });
          if (it == e.scores.end()) {
            e.scores.emplace_back(key, score.get<double>());
          } else {
            it->second = score.get<double>();
          }
        }
      }
      if (v.contains("aliases")) {
        for (const auto& [alias, target] : v.at("aliases").items()) {
          e.aliases[normalize_key(alias)] = normalize_key(target.get<std::string>());
        }
      }
      if (v.contains("fallback")) e.fallback = normalize_key(v.at("fallback").get<std::string>());
      (void)fallback_score(static_cast<StructuralFeature>(
          index_of(kFeatureNames, name, "structural feature")));
    }
  }
  if (o.contains("building_heights")) {
    for (const auto& [name, v] : o.at("building_heights").items()) {
      const double h = v.get<double>();
      if (!(h > 0.0)) throw ValidationError("catalog: building heights must be > 0");
      heights_[index_of(kBuildingTypeNames, name, "building type")] = h;
    }
  }
}

}  // namespace wuigraph

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "wuigraph/catalogs.hpp"
#include "wuigraph/spatial.hpp"

namespace wuigraph {

inline constexpr std::size_t kEmbeddingDim = 64;
inline constexpr std::size_t kTopographicDim = 2;
inline constexpr std::size_t kStructuralDim = 8;
inline constexpr std::size_t kFeatureDim = kEmbeddingDim + kTopographicDim + kStructuralDim;
static_assert(kFeatureDim == 74);

/// Offsets into the 74-entry node feature vector:
/// [0, 64) embedding | 64 slope | 65 elevation | [66, 74) structural.
inline constexpr std::size_t kSlopeSlot = 64;
inline constexpr std::size_t kElevationSlot = 65;
inline constexpr std::size_t kStructuralOffset = 66;

/// Order of the structural block. The first seven are encoded DINS-style
/// attributes; the last is the intensity rank (0-6) of the fuel class the
/// building inherits from vegetation within 30 m.
enum class StructuralSlot : std::size_t {
  Roof = 0,
  Siding,
  Eaves,
  VentScreen,
  Window,
  DeckPorch,
  Fence,
  FuelExposure,
};

inline constexpr std::array<const char*, kStructuralDim> kStructuralSlotNames = {
    "roof", "siding", "eaves", "vent_screen", "window", "deck_porch", "fence", "fuel_exposure"};

enum class NodeKind { Building, Vegetation };

/// LandFire-style canopy attributes. NaN marks a missing value.
struct CanopyAttributes {
  double cbd = std::numeric_limits<double>::quiet_NaN();
  double cbh = std::numeric_limits<double>::quiet_NaN();
  double ch = std::numeric_limits<double>::quiet_NaN();
  double cd = std::numeric_limits<double>::quiet_NaN();
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Building;
  GeoPoint location;
  LonLat lonlat;
  FuelClass fuel_class = FuelClass::NonBurnable;
  BuildingType building_type = BuildingType::Unknown;
  Material material = Material::Unknown;  // siding for buildings, Vegetation otherwise
  double area = 0.0;                      // m^2
  double volume = 0.0;                    // m^3
  std::array<double, kStructuralDim> structural{};  // all zero for vegetation
  std::array<double, kEmbeddingDim> embedding{};
  double slope = 0.0;      // degrees
  double elevation = 0.0;  // m
  CanopyAttributes canopy;
  std::optional<int> label;  // 0 survived, 1 damaged; buildings only

  bool is_building() const { return kind == NodeKind::Building; }
  bool burnable() const { return is_burnable(fuel_class); }
  double structural_at(StructuralSlot s) const {
    return structural[static_cast<std::size_t>(s)];
  }

  /// The 74-entry feature vector in the fixed slot order above.
  std::array<double, kFeatureDim> features() const;
};

}  // namespace wuigraph

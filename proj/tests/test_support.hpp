#pragma once

#include <wuigraph/catalogs.hpp>
#include <wuigraph/node.hpp>
#include <wuigraph/rng.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace wuigraph::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wuigraph_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Node make_vegetation(std::string id, GeoPoint at, FuelClass fuel,
                            const Catalog& catalog = Catalog::defaults()) {
  Node n;
  n.id = std::move(id);
  n.kind = NodeKind::Vegetation;
  n.location = at;
  n.fuel_class = fuel;
  n.material = Material::Vegetation;
  n.area = 900.0;
  n.volume = catalog.vegetation_volume(fuel);
  return n;
}

inline Node make_building(std::string id, GeoPoint at, Material siding, double area,
                          const Catalog& catalog = Catalog::defaults()) {
  Node n;
  n.id = std::move(id);
  n.kind = NodeKind::Building;
  n.location = at;
  n.fuel_class = FuelClass::Moderate;
  n.building_type = BuildingType::SingleResidence;
  n.material = siding;
  n.area = area;
  n.volume = catalog.building_volume(area, n.building_type);
  n.structural = {catalog.feature_score(StructuralFeature::Roof, "wood"),
                  catalog.siding_score(siding),
                  catalog.feature_score(StructuralFeature::Eaves, "wood"),
                  catalog.feature_score(StructuralFeature::VentScreen, "mesh_lt_4mm"),
                  catalog.feature_score(StructuralFeature::Window, "single_pane"),
                  catalog.feature_score(StructuralFeature::DeckPorch, "none"),
                  catalog.feature_score(StructuralFeature::Fence, "combustible"),
                  static_cast<double>(intensity_rank(n.fuel_class))};
  return n;
}

// Mixed buildings and vegetation scattered over a square, with every fuel
// class and siding material represented.
inline std::vector<Node> random_nodes(std::size_t n, double side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint p{rng.uniform(0.0, side), rng.uniform(0.0, side)};
    if (rng.bernoulli(0.4)) {
      const Material m = kAllMaterials[rng.below(kAllMaterials.size())];
      Node b = make_building("b" + std::to_string(i), p,
                             m == Material::Vegetation ? Material::Wood : m,
                             rng.uniform(60.0, 300.0));
      b.fuel_class = kAllFuelClasses[rng.below(6)];
      nodes.push_back(std::move(b));
    } else {
      nodes.push_back(make_vegetation("v" + std::to_string(i), p,
                                      kAllFuelClasses[rng.below(kAllFuelClasses.size())]));
    }
  }
  return nodes;
}

}  // namespace wuigraph::testing

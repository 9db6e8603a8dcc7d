#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace wuigraph {

/// Planar position in meters (x east, y north) in a scenario-local frame.
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Longitude/latitude in WGS84 degrees.
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

/// Euclidean distance. Throws ValidationError on non-finite coordinates.
double distance(const GeoPoint& a, const GeoPoint& b);

/// Compass bearing from a to b in degrees, [0, 360): 0 = north, 90 = east.
/// Throws ValidationError when a and b coincide.
double bearing(const GeoPoint& a, const GeoPoint& b);

/// Absolute angular difference wrapped to [0, 180].
double angular_difference(double a_deg, double b_deg);

/// Azimuthal-equidistant projection on the WGS84 mean sphere, centered on a
/// fixed origin. Distances from the origin are exact; community-scale
/// extents keep pairwise distortion far below a meter.
class LocalProjection {
 public:
  explicit LocalProjection(LonLat origin);

  /// Origin at the mean of the given coordinates.
  static LocalProjection centered_on(std::span<const LonLat> points);

  GeoPoint forward(const LonLat& p) const;
  LonLat inverse(const GeoPoint& p) const;
  const LonLat& origin() const { return origin_; }

 private:
  LonLat origin_;
  double sin_lat0_;
  double cos_lat0_;
};

/// Uniform grid over point ids. Immutable after construction; concurrent
/// queries are safe.
class SpatialIndex {
 public:
  using Id = std::uint32_t;

  SpatialIndex(std::span<const GeoPoint> points, double cell_size);

  /// Ids whose distance to `center` is <= r, ascending. `exclude` (if set)
  /// is dropped from the result, which is how a node's own id is omitted.
  std::vector<Id> radius_query(const GeoPoint& center, double r,
                               std::int64_t exclude = -1) const;

  /// Nearest point id and its distance, or -1 for an empty index.
  /// Ties go to the lowest id.
  std::pair<std::int64_t, double> nearest(const GeoPoint& center) const;

  double cell_size() const { return cell_size_; }
  std::size_t size() const { return points_.size(); }
  std::size_t cell_count() const { return cells_.size(); }

 private:
  struct CellKey {
    std::int64_t cx;
    std::int64_t cy;
    friend bool operator==(const CellKey&, const CellKey&) = default;
  };
  struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept;
  };

  CellKey cell_of(const GeoPoint& p) const;

  std::vector<GeoPoint> points_;
  double cell_size_;
  std::unordered_map<CellKey, std::vector<Id>, CellHash> cells_;
  std::int64_t min_cx_ = 0, max_cx_ = -1, min_cy_ = 0, max_cy_ = -1;
};

}  // namespace wuigraph

#include "wuigraph/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

constexpr double kEarthRadius = 6371008.8;  // mean radius, meters
constexpr double kDeg = std::numbers::pi / 180.0;

void require_finite(const GeoPoint& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw ValidationError("invalid geometry: non-finite coordinate");
  }
}

}  // namespace

double distance(const GeoPoint& a, const GeoPoint& b) {
  require_finite(a);
  require_finite(b);
  return std::hypot(b.x - a.x, b.y - a.y);
}

double bearing(const GeoPoint& a, const GeoPoint& b) {
  require_finite(a);
  require_finite(b);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (dx == 0.0 && dy == 0.0) {
    throw ValidationError("degenerate edge: coincident points have no bearing");
  }
  double deg = std::atan2(dx, dy) / kDeg;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

double angular_difference(double a_deg, double b_deg) {
  double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

LocalProjection::LocalProjection(LonLat origin)
    : origin_(origin),
      sin_lat0_(std::sin(origin.lat * kDeg)),
      cos_lat0_(std::cos(origin.lat * kDeg)) {
  if (!std::isfinite(origin.lon) || !std::isfinite(origin.lat) ||
      std::fabs(origin.lat) > 90.0) {
    throw ValidationError("invalid projection origin");
  }
}

LocalProjection LocalProjection::centered_on(std::span<const LonLat> points) {
  if (points.empty()) throw ValidationError("cannot center projection on zero points");
  double lon = 0.0, lat = 0.0;
  for (const auto& p : points) {
    lon += p.lon;
    lat += p.lat;
  }
  const double n = static_cast<double>(points.size());
  return LocalProjection({lon / n, lat / n});
}

GeoPoint LocalProjection::forward(const LonLat& p) const {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
    throw ValidationError("invalid geometry: non-finite lon/lat");
  }
  const double lat = p.lat * kDeg;
  const double dlon = (p.lon - origin_.lon) * kDeg;
  const double sin_lat = std::sin(lat), cos_lat = std::cos(lat);
  const double cos_c = std::clamp(
      sin_lat0_ * sin_lat + cos_lat0_ * cos_lat * std::cos(dlon), -1.0, 1.0);
  const double c = std::acos(cos_c);
  const double k = c < 1e-12 ? 1.0 : c / std::sin(c);
  return {kEarthRadius * k * cos_lat * std::sin(dlon),
          kEarthRadius * k * (cos_lat0_ * sin_lat - sin_lat0_ * cos_lat * std::cos(dlon))};
}

LonLat LocalProjection::inverse(const GeoPoint& p) const {
  require_finite(p);
  const double rho = std::hypot(p.x, p.y);
  if (rho < 1e-12) return origin_;
  const double c = rho / kEarthRadius;
  const double sin_c = std::sin(c), cos_c = std::cos(c);
  const double lat = std::asin(
      std::clamp(cos_c * sin_lat0_ + p.y * sin_c * cos_lat0_ / rho, -1.0, 1.0));
  const double lon = origin_.lon * kDeg +
                     std::atan2(p.x * sin_c, rho * cos_lat0_ * cos_c - p.y * sin_lat0_ * sin_c);
  return {lon / kDeg, lat / kDeg};
}

std::size_t SpatialIndex::CellHash::operator()(const CellKey& k) const noexcept {
  return static_cast<std::size_t>(
      splitmix64(static_cast<std::uint64_t>(k.cx) * 0x9e3779b97f4a7c15ULL ^
                 static_cast<std::uint64_t>(k.cy)));
}

SpatialIndex::SpatialIndex(std::span<const GeoPoint> points, double cell_size)
    : points_(points.begin(), points.end()), cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ValidationError("spatial index cell size must be positive");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require_finite(points_[i]);
    const CellKey key = cell_of(points_[i]);
    cells_[key].push_back(static_cast<Id>(i));
    if (i == 0) {
      min_cx_ = max_cx_ = key.cx;
      min_cy_ = max_cy_ = key.cy;
    } else {
      min_cx_ = std::min(min_cx_, key.cx);
      max_cx_ = std::max(max_cx_, key.cx);
      min_cy_ = std::min(min_cy_, key.cy);
      max_cy_ = std::max(max_cy_, key.cy);
    }
  }
}

SpatialIndex::CellKey SpatialIndex::cell_of(const GeoPoint& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.y / cell_size_))};
}

std::vector<SpatialIndex::Id> SpatialIndex::radius_query(const GeoPoint& center, double r,
                                                         std::int64_t exclude) const {
  require_finite(center);
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  std::vector<Id> out;
  if (points_.empty()) return out;
  const std::int64_t cx0 = std::max(min_cx_, static_cast<std::int64_t>(std::floor((center.x - r) / cell_size_)));
  const std::int64_t cx1 = std::min(max_cx_, static_cast<std::int64_t>(std::floor((center.x + r) / cell_size_)));
  const std::int64_t cy0 = std::max(min_cy_, static_cast<std::int64_t>(std::floor((center.y - r) / cell_size_)));
  const std::int64_t cy1 = std::min(max_cy_, static_cast<std::int64_t>(std::floor((center.y + r) / cell_size_)));
  for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      auto it = cells_.find({cx, cy});
      if (it == cells_.end()) continue;
      for (Id id : it->second) {
        if (static_cast<std::int64_t>(id) == exclude) continue;
        if (distance(center, points_[id]) <= r) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::int64_t, double> SpatialIndex::nearest(const GeoPoint& center) const {
  require_finite(center);
  if (points_.empty()) return {-1, std::numeric_limits<double>::infinity()};
  std::int64_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  const CellKey c = cell_of(center);
  const std::int64_t max_ring =
      std::max({std::abs(c.cx - min_cx_), std::abs(c.cx - max_cx_),
                std::abs(c.cy - min_cy_), std::abs(c.cy - max_cy_)});
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    for (std::int64_t cx = c.cx - ring; cx <= c.cx + ring; ++cx) {
      for (std::int64_t cy = c.cy - ring; cy <= c.cy + ring; ++cy) {
        if (std::max(std::abs(cx - c.cx), std::abs(cy - c.cy)) != ring) continue;
        auto it = cells_.find({cx, cy});
        if (it == cells_.end()) continue;
        for (Id id : it->second) {
          const double d = distance(center, points_[id]);
          if (d < best_d || (d == best_d && static_cast<std::int64_t>(id) < best)) {
            best_d = d;
            best = id;
          }
        }
      }
    }
    // Any point outside ring k lies at least k * cell_size away.
    if (best >= 0 && best_d < static_cast<double>(ring) * cell_size_) break;
  }
  return {best, best_d};
}

}  // namespace wuigraph

#include <wuigraph/error.hpp>
#include <wuigraph/rng.hpp>
#include <wuigraph/spatial.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace wuigraph;

TEST(Distance, HandValues) {
  EXPECT_EQ(distance({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_EQ(distance({10, 10}, {10, 70}), 60.0);
}

TEST(Distance, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(distance({nan, 0}, {0, 0}), ValidationError);
  EXPECT_THROW(distance({0, 0}, {0, std::numeric_limits<double>::infinity()}), ValidationError);
}

TEST(Distance, MetricAxiomsOnRandomSamples) {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const GeoPoint a{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)};
    const GeoPoint b{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)};
    const GeoPoint c{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)};
    EXPECT_GE(distance(a, b), 0.0);
    EXPECT_EQ(distance(a, b), distance(b, a));
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST(Bearing, CompassConvention) {
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {1, 0}), 90.0);
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {0, -1}), 180.0);
  EXPECT_NEAR(bearing({0, 0}, {-1, -1}), 225.0, 1e-12);
  EXPECT_THROW(bearing({5, 5}, {5, 5}), ValidationError);
}

TEST(Bearing, ReverseDiffersByHalfTurn) {
  Rng rng(12);
  for (int k = 0; k < 2000; ++k) {
    const GeoPoint a{rng.uniform(-500, 500), rng.uniform(-500, 500)};
    const GeoPoint b{rng.uniform(-500, 500), rng.uniform(-500, 500)};
    const double fwd = bearing(a, b), back = bearing(b, a);
    ASSERT_GE(fwd, 0.0);
    ASSERT_LT(fwd, 360.0);
    EXPECT_NEAR(angular_difference(fwd, back), 180.0, 1e-9);
  }
}

TEST(AngularDifference, WrapsIntoHalfCircle) {
  EXPECT_DOUBLE_EQ(angular_difference(350, 10), 20.0);
  EXPECT_DOUBLE_EQ(angular_difference(10, 350), 20.0);
  EXPECT_DOUBLE_EQ(angular_difference(0, 180), 180.0);
  EXPECT_DOUBLE_EQ(angular_difference(225, 225), 0.0);
}

TEST(LocalProjection, OriginMapsToZeroAndRoundTrips) {
  const LocalProjection proj({-118.1, 34.19});
  const GeoPoint o = proj.forward({-118.1, 34.19});
  EXPECT_NEAR(o.x, 0.0, 1e-9);
  EXPECT_NEAR(o.y, 0.0, 1e-9);
  for (double dlon : {-0.02, 0.0, 0.013}) {
    for (double dlat : {-0.01, 0.004, 0.02}) {
      const LonLat p{-118.1 + dlon, 34.19 + dlat};
      const LonLat back = proj.inverse(proj.forward(p));
      EXPECT_NEAR(back.lon, p.lon, 1e-10);
      EXPECT_NEAR(back.lat, p.lat, 1e-10);
    }
  }
}

TEST(LocalProjection, DistancesMatchHaversineAtCommunityScale) {
  const LonLat o{-118.1, 34.19};
  const LocalProjection proj(o);
  constexpr double kR = 6371008.8;
  constexpr double kDeg = M_PI / 180.0;
  auto haversine = [&](LonLat a, LonLat b) {
    const double dlat = (b.lat - a.lat) * kDeg, dlon = (b.lon - a.lon) * kDeg;
    const double h = std::pow(std::sin(dlat / 2), 2) +
                     std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::pow(std::sin(dlon / 2), 2);
    return 2 * kR * std::asin(std::sqrt(h));
  };
  const LonLat a{-118.11, 34.185}, b{-118.095, 34.196};
  EXPECT_NEAR(distance(proj.forward(a), proj.forward(b)), haversine(a, b), 0.5);
  EXPECT_NEAR(distance(proj.forward(o), proj.forward(b)), haversine(o, b), 1e-6);
  // North stays north.
  EXPECT_GT(proj.forward({o.lon, o.lat + 0.001}).y, 0.0);
  EXPECT_GT(proj.forward({o.lon + 0.001, o.lat}).x, 0.0);
}

TEST(SpatialIndex, InclusiveBoundaryAndSelfExclusion) {
  const std::vector<GeoPoint> pts = {{0, 0}, {199.9, 0}, {0, 200.0}, {200.0001, 0}};
  const SpatialIndex idx(pts, 200.0);
  const auto hits = idx.radius_query({0, 0}, 200.0, 0);
  EXPECT_EQ(hits, (std::vector<SpatialIndex::Id>{1, 2}));
  const auto with_self = idx.radius_query({0, 0}, 200.0);
  EXPECT_EQ(with_self, (std::vector<SpatialIndex::Id>{0, 1, 2}));
}

TEST(SpatialIndex, EmptyIndex) {
  const SpatialIndex idx({}, 50.0);
  EXPECT_TRUE(idx.radius_query({0, 0}, 100.0).empty());
  EXPECT_EQ(idx.nearest({0, 0}).first, -1);
}

TEST(SpatialIndex, RejectsNonPositiveCellSize) {
  const std::vector<GeoPoint> pts = {{0, 0}};
  EXPECT_THROW(SpatialIndex(pts, 0.0), ValidationError);
}

TEST(SpatialIndex, EveryPointInExactlyOneCell) {
  Rng rng(3);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 400; ++i) pts.push_back({rng.uniform(-300, 300), rng.uniform(-300, 300)});
  const SpatialIndex idx(pts, 37.0);
  // A query large enough to cover everything returns each id once.
  const auto all = idx.radius_query({0, 0}, 1000.0);
  ASSERT_EQ(all.size(), pts.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(SpatialIndex, RadiusQueryMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<GeoPoint> pts;
    const std::size_t n = 100 * seed;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(0, 1500), rng.uniform(0, 1500)});
    // Exact duplicates and points on a lattice exercise ties at the boundary.
    pts.push_back(pts.front());
    pts.push_back({pts[1].x + 200.0, pts[1].y});
    for (double cell : {200.0, 55.0, 611.0}) {
      const SpatialIndex idx(pts, cell);
      for (std::size_t c = 0; c < pts.size(); ++c) {
        const double r = c % 3 == 0 ? 200.0 : rng.uniform(1.0, 400.0);
        std::vector<SpatialIndex::Id> expect;
        for (std::size_t j = 0; j < pts.size(); ++j) {
          if (j != c && distance(pts[c], pts[j]) <= r) expect.push_back(static_cast<SpatialIndex::Id>(j));
        }
        ASSERT_EQ(idx.radius_query(pts[c], r, static_cast<std::int64_t>(c)), expect)
            << "seed " << seed << " center " << c << " r " << r;
      }
    }
  }
}

TEST(SpatialIndex, NearestMatchesBruteForceWithLowestIdTies) {
  Rng rng(8);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(0, 900), rng.uniform(0, 900)});
  pts.push_back(pts[17]);  // tie: id 17 must win over 300
  const SpatialIndex idx(pts, 50.0);
  for (int q = 0; q < 500; ++q) {
    const GeoPoint c = q == 0 ? pts[17] : GeoPoint{rng.uniform(-100, 1000), rng.uniform(-100, 1000)};
    std::int64_t best = -1;
    double best_d = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d = distance(c, pts[j]);
      if (best < 0 || d < best_d) {
        best = static_cast<std::int64_t>(j);
        best_d = d;
      }
    }
    const auto [id, d] = idx.nearest(c);
    EXPECT_EQ(id, best);
    EXPECT_EQ(d, best_d);
  }
}

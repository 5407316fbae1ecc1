#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lanemap/error.hpp"
#include "lanemap/geo.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {
namespace {

constexpr double kPi = std::numbers::pi;

TileSpec make_tile(GlobalPoint c, double heading) {
  TileSpec t;
  t.center = c;
  t.heading = heading;
  return t;
}

// Independent rotation: build the heading basis vectors explicitly.
GlobalPoint oracle_pixel_to_global(PixelCoord pix, const TileSpec& t) {
  const GlobalPoint ex{std::cos(t.heading), std::sin(t.heading)};
  const GlobalPoint ey{-std::sin(t.heading), std::cos(t.heading)};
  const double a = t.pixel_size * (pix.u - t.width / 2.0);
  const double b = -t.pixel_size * (pix.v - t.height / 2.0);
  return t.center + a * ex + b * ey;
}

TEST(Geo, CenterPixelMapsToTileCenter) {
  for (double h : {0.0, 0.3, kPi / 2, -2.0, kPi}) {
    const TileSpec t = make_tile({100.0, -50.0}, h);
    const GlobalPoint g = pixel_to_global({128, 128}, t);
    EXPECT_NEAR(g.x, 100.0, 1e-12);
    EXPECT_NEAR(g.y, -50.0, 1e-12);
  }
}

TEST(Geo, PixelAlongHeadingAxis) {
  const GlobalPoint g = pixel_to_global({192, 128}, make_tile({0, 0}, 0.0));
  EXPECT_NEAR(g.x, 16.0, 1e-12);
  EXPECT_NEAR(g.y, 0.0, 1e-12);

  const TileSpec t = make_tile({3.0, 4.0}, kPi / 2);
  const GlobalPoint r = pixel_to_global({192, 100}, t);
  const GlobalPoint o = oracle_pixel_to_global({192, 100}, t);
  EXPECT_NEAR(r.x, o.x, 1e-12);
  EXPECT_NEAR(r.y, o.y, 1e-12);
  EXPECT_NEAR(r.x, 3.0 - 7.0, 1e-12);
  EXPECT_NEAR(r.y, 4.0 + 16.0, 1e-12);
}

TEST(Geo, MatchesOracleOnRandomTiles) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-1000, 1000), ang(-kPi, kPi);
  std::uniform_int_distribution<int> pix(0, 255);
  for (int i = 0; i < 500; ++i) {
    const TileSpec t = make_tile({pos(rng), pos(rng)}, ang(rng));
    const PixelCoord p{pix(rng), pix(rng)};
    const GlobalPoint a = pixel_to_global(p, t);
    const GlobalPoint b = oracle_pixel_to_global(p, t);
    EXPECT_NEAR(a.x, b.x, 1e-9);
    EXPECT_NEAR(a.y, b.y, 1e-9);
  }
}

TEST(Geo, GlobalToPixelExamples) {
  const TileSpec t = make_tile({0, 0}, 0.0);
  EXPECT_EQ(global_to_pixel({0, 0}, t), (PixelCoord{128, 128}));
  EXPECT_EQ(global_to_pixel({16, 0}, t), (PixelCoord{192, 128}));
  EXPECT_EQ(global_to_pixel({0, 16}, t), (PixelCoord{128, 64}));
}

TEST(Geo, Errors) {
  const TileSpec t = make_tile({0, 0}, 0.0);
  try {
    (void)pixel_to_global({256, 0}, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInputDomain);
  }
  try {
    (void)pixel_to_global({0, -1}, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInputDomain);
  }
  try {
    (void)global_to_pixel({40, 0}, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfTile);
  }
  TileSpec bad = t;
  bad.pixel_size = 0.0;
  EXPECT_THROW(validate(bad), Error);
}

TEST(Geo, RoundTripWithinHalfDiagonal) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-5000, 5000), ang(-kPi, kPi);
  // Pixel cells span [-32.125, 31.875) along x; rows run against y, so y
  // covers (-31.875, 32.125].
  std::uniform_real_distribution<double> local_x(-32.125, 31.875), local_y(-31.875, 32.125);
  for (int i = 0; i < 2000; ++i) {
    const TileSpec t = make_tile({pos(rng), pos(rng)}, ang(rng));
    const GlobalPoint pt = t.center + rotate({local_x(rng), local_y(rng)}, t.heading);
    const GlobalPoint back = pixel_to_global(global_to_pixel(pt, t), t);
    EXPECT_LE(distance(pt, back), 0.5 * t.pixel_size * std::sqrt(2.0) + 1e-9);
  }
}

TEST(Geo, IntegerPixelsRoundTripExactly) {
  const TileSpec t = make_tile({12.5, -7.0}, 1.234);
  for (int u = 0; u < 256; u += 5) {
    for (int v = 0; v < 256; v += 7) {
      EXPECT_EQ(global_to_pixel(pixel_to_global({u, v}, t), t), (PixelCoord{u, v}));
    }
  }
}

TEST(Geo, IsometryPreservesDistances) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pix(0, 255);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const TileSpec t = make_tile({10.0, 20.0}, ang(rng));
    const PixelCoord a{pix(rng), pix(rng)}, b{pix(rng), pix(rng)};
    const double pixel_dist = t.pixel_size * std::hypot(a.u - b.u, a.v - b.v);
    EXPECT_NEAR(distance(pixel_to_global(a, t), pixel_to_global(b, t)), pixel_dist, 1e-9);
  }
}

TEST(Geo, FootprintHeadingZeroAndPi) {
  const TileSpec t0 = make_tile({0, 0}, 0.0);
  for (const GlobalPoint& c : t0.corners()) {
    EXPECT_NEAR(std::abs(c.x), 32.0, 1e-12);
    EXPECT_NEAR(std::abs(c.y), 32.0, 1e-12);
  }
  EXPECT_TRUE(t0.covers({32.0, -32.0}));
  EXPECT_TRUE(t0.covers({0.0, 0.0}));
  EXPECT_FALSE(t0.covers({32.5, 0.0}));

  const TileSpec tp = make_tile({0, 0}, kPi);
  for (const GlobalPoint& c : tp.corners()) {
    bool found = false;
    for (const GlobalPoint& d : t0.corners()) {
      found = found || distance(c, d) < 1e-9;
    }
    EXPECT_TRUE(found);
  }

  // Shoelace area.
  const auto c = make_tile({5, 5}, 0.7).corners();
  double area = 0.0;
  for (int i = 0; i < 4; ++i) area += cross(c[i], c[(i + 1) % 4]);
  EXPECT_NEAR(0.5 * area, 4096.0, 1e-6);
}

TEST(Geo, TileForRoadPoint) {
  RoadPoint rp{"r", {10.0, 20.0}, 0.5, 3.0};
  const TileSpec t = tile_for_road_point(rp);
  EXPECT_EQ(t.center, rp.position);
  EXPECT_DOUBLE_EQ(t.heading, 0.5);
  EXPECT_DOUBLE_EQ(t.pixel_size, 0.25);
  EXPECT_EQ(t.width, 256);

  Road road{"straight", {{0, 0}, {10, 0}}, std::nullopt};
  const auto pts = interpolate_road(road, 1.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_NEAR(distance(tile_for_road_point(pts[i]).center,
                         tile_for_road_point(pts[i - 1]).center),
                1.0, 1e-12);
  }
}

TEST(Geo, PolylineHelpers) {
  const std::vector<GlobalPoint> l{{0, 0}, {3, 0}, {3, 4}};
  EXPECT_DOUBLE_EQ(polyline_length(l), 7.0);
  EXPECT_DOUBLE_EQ(point_polyline_distance({1, 2}, l), 2.0);
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(-kPi), kPi, 1e-12);
}

}  // namespace
}  // namespace lanemap

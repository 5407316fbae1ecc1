#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lanemap/error.hpp"
#include "lanemap/evaluation.hpp"
#include "support/oracles.hpp"

namespace lanemap {
namespace {

Lane lane(LaneId id, std::vector<GlobalPoint> pts, LaneClass c = LaneClass::kWhite) {
  Lane l;
  l.id = id;
  l.polyline = std::move(pts);
  l.lane_class = c;
  return l;
}

HDMap random_map(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> c(-200, 200), len(10, 60), ang(-3.14, 3.14);
  HDMap m;
  for (int i = 0; i < n; ++i) {
    const GlobalPoint a{c(rng), c(rng)};
    const double t = ang(rng);
    const GlobalPoint b = a + len(rng) * GlobalPoint{std::cos(t), std::sin(t)};
    m.lanes.push_back(lane(static_cast<LaneId>(i), {a, 0.5 * (a + b) + GlobalPoint{0.3, -0.2}, b}));
  }
  return m;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(LaneDistance, Basics) {
  const Lane a = lane(0, {{0, 0}, {5, 1}, {10, 0}});
  Lane rev = a;
  std::reverse(rev.polyline.begin(), rev.polyline.end());
  EXPECT_EQ(lane_pair_distance(a, a), 0.0);
  EXPECT_EQ(lane_pair_distance(a, rev), 0.0);
  const Lane par = lane(1, {{0, 2}, {10, 2}});
  const Lane base = lane(2, {{0, 0}, {10, 0}});
  EXPECT_DOUBLE_EQ(lane_pair_distance(base, par), 2.0);
  EXPECT_EQ(kind_of([&] { lane_pair_distance(base, lane(3, {{0, 0}})); }), ErrorKind::kInputDomain);
}

TEST(MatchMaps, SelfMatch) {
  std::mt19937_64 rng(1);
  const HDMap m = random_map(rng, 12);
  const auto r = match_maps(m, m);
  ASSERT_EQ(r.pairs.size(), 12u);
  for (const auto& p : r.pairs) {
    EXPECT_EQ(p.constructed, p.gt);
    EXPECT_EQ(p.distance, 0.0);
  }
}

TEST(MatchMaps, MissingGtLane) {
  std::mt19937_64 rng(2);
  const HDMap gt = random_map(rng, 8);
  HDMap c = gt;
  c.lanes.erase(c.lanes.begin() + 3);
  const auto r = match_maps(c, gt);
  EXPECT_EQ(r.pairs.size(), 7u);
  ASSERT_EQ(r.unmatched_gt.size(), 1u);
  EXPECT_EQ(r.unmatched_gt[0], 3u);
}

TEST(MatchMaps, EmptyGt) {
  std::mt19937_64 rng(3);
  const auto r = match_maps(random_map(rng, 4), HDMap{});
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_EQ(r.unmatched_constructed.size(), 4u);
}

TEST(MatchMaps, BruteForceFiveByFive) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> c(0, 30);
  for (int trial = 0; trial < 50; ++trial) {
    HDMap a, b;
    for (int i = 0; i < 5; ++i) {
      a.lanes.push_back(lane(i, {{c(rng), c(rng)}, {c(rng), c(rng)}}));
      b.lanes.push_back(lane(i, {{c(rng), c(rng)}, {c(rng), c(rng)}}));
    }
    WeightMatrix w(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) w(i, j) = lane_pair_distance(a.lanes[i], b.lanes[j]);
    }
    const auto m = match_maps(a, b, 1e9);
    ASSERT_EQ(m.pairs.size(), 5u);
    double total = 0.0;
    for (const auto& p : m.pairs) total += p.distance;
    EXPECT_NEAR(total, oracle::brute_force_optimum(w, false), 1e-9);
  }
}

TEST(MatchMaps, CutoffDemotes) {
  HDMap a, b;
  a.lanes.push_back(lane(0, {{0, 0}, {10, 0}}));
  b.lanes.push_back(lane(0, {{0, 20}, {10, 20}}));
  const auto m = match_maps(a, b);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_constructed.size(), 1u);
  EXPECT_EQ(m.unmatched_gt.size(), 1u);
}

Matching with_distances(const std::vector<double>& d) {
  Matching m;
  for (std::size_t i = 0; i < d.size(); ++i) m.pairs.push_back({i, i, d[i]});
  return m;
}

TEST(Metrics, Coverage) {
  EXPECT_DOUBLE_EQ(map_coverage(with_distances(std::vector<double>(20, 0.0)), 20), 100.0);
  EXPECT_DOUBLE_EQ(map_coverage(with_distances(std::vector<double>(10, 0.0)), 20), 50.0);
  EXPECT_EQ(kind_of([] { map_coverage({}, 0); }), ErrorKind::kUndefinedMetric);
}

TEST(Metrics, Accuracy) {
  const auto m = with_distances({0.1, 0.3, 2.0});
  EXPECT_NEAR(map_accuracy(m, 0.25, 3), 100.0 / 3, 1e-12);
  EXPECT_NEAR(map_accuracy(m, 1.0, 3), 200.0 / 3, 1e-12);
  EXPECT_NEAR(map_accuracy(m, 1.5, 3), 200.0 / 3, 1e-12);
  // Strictly below the threshold.
  EXPECT_NEAR(map_accuracy(m, 0.3, 3), 100.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(map_accuracy(with_distances({0, 0}), 0.01, 2), 100.0);
  EXPECT_EQ(kind_of([&] { map_accuracy(m, 0.0, 3); }), ErrorKind::kInputDomain);
  EXPECT_EQ(kind_of([&] { map_accuracy(m, 1.0, 0); }), ErrorKind::kUndefinedMetric);
}

TEST(Metrics, MeanVertexDistance) {
  EXPECT_DOUBLE_EQ(mean_vertex_distance(with_distances({0, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(mean_vertex_distance(with_distances({0.1, 0.3})), 0.2);
  EXPECT_EQ(kind_of([] { mean_vertex_distance({}); }), ErrorKind::kUndefinedMetric);
}

TEST(Metrics, SelfEvaluationIdentity) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const HDMap m = random_map(rng, 1 + trial);
    const auto r = evaluate_maps(m, m);
    EXPECT_EQ(r.coverage_pct, 100.0);
    for (const auto& [t, v] : r.accuracy_pct) EXPECT_EQ(v, 100.0);
    EXPECT_EQ(r.mean_vertex_distance_m, 0.0);
  }
}

TEST(Metrics, MonotoneAndBoundedByCoverage) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const HDMap gt = random_map(rng, 10);
    HDMap c = gt;
    for (auto& l : c.lanes) {
      for (auto& p : l.polyline) p = p + GlobalPoint{n(rng), n(rng)};
    }
    const auto r = evaluate_maps(c, gt, {0.1, 0.25, 0.5, 1.0, 1.5, 3.0});
    for (std::size_t k = 0; k < r.accuracy_pct.size(); ++k) {
      EXPECT_LE(*r.accuracy_pct[k].second, *r.coverage_pct);
      if (k) EXPECT_LE(*r.accuracy_pct[k - 1].second, *r.accuracy_pct[k].second);
    }
  }
}

TEST(Metrics, RigidMotionInvariance) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 0.7);
  const HDMap gt = random_map(rng, 15);
  HDMap c = gt;
  for (auto& l : c.lanes) {
    for (auto& p : l.polyline) p = p + GlobalPoint{n(rng), n(rng)};
  }
  auto move = [](HDMap m) {
    for (auto& l : m.lanes) {
      for (auto& p : l.polyline) p = rotate(p, 0.9) + GlobalPoint{3000.5, -1234.25};
    }
    return m;
  };
  const auto a = evaluate_maps(c, gt);
  const auto b = evaluate_maps(move(c), move(gt));
  EXPECT_EQ(a.matched, b.matched);
  EXPECT_NEAR(*a.coverage_pct, *b.coverage_pct, 1e-9);
  EXPECT_NEAR(*a.mean_vertex_distance_m, *b.mean_vertex_distance_m, 1e-9);
  for (std::size_t k = 0; k < a.accuracy_pct.size(); ++k) {
    EXPECT_NEAR(*a.accuracy_pct[k].second, *b.accuracy_pct[k].second, 1e-9);
  }
}

TileSpec small_tile(int size = 256) {
  TileSpec t;
  t.width = t.height = size;
  return t;
}

LaneImage row_image(const std::vector<int>& rows, int size = 256, LaneClass c = LaneClass::kWhite) {
  LaneImage img(small_tile(size));
  for (int v : rows) {
    for (int u = 0; u < size; ++u) img.at(static_cast<int>(c), u, v) = 1.0f;
  }
  return img;
}

TEST(Raster, PixelAccuracyIdentityAndCounting) {
  const LaneImage gt = row_image({100});
  const auto same = pixel_accuracy(gt, gt);
  for (double v : same.per_class) EXPECT_DOUBLE_EQ(v, 100.0);
  EXPECT_DOUBLE_EQ(same.total, 100.0);

  const auto empty = pixel_accuracy(LaneImage(small_tile()), gt);
  const double n = 256.0 * 256.0;
  EXPECT_DOUBLE_EQ(empty.per_class[1], 100.0 * (n - 256) / n);
  EXPECT_DOUBLE_EQ(empty.per_class[0], 100.0);
}

TEST(Raster, PixelAccuracyMatchesNaiveRecount) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<float> val(0, 1);
  LaneImage a(small_tile(32)), b(small_tile(32));
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 32; ++v) {
      for (int u = 0; u < 32; ++u) {
        a.at(c, u, v) = val(rng) < 0.8f ? 0.0f : val(rng);
        b.at(c, u, v) = val(rng) < 0.8f ? 0.0f : val(rng);
      }
    }
  }
  // Naive: binarize each pixel to its argmax class (ties low) when >= 0.5.
  auto cls = [](const LaneImage& img, int u, int v) {
    int best = 0;
    for (int c = 1; c < 3; ++c) {
      if (img.at(c, u, v) > img.at(best, u, v)) best = c;
    }
    return img.at(best, u, v) >= 0.5f ? best : -1;
  };
  const auto pa = pixel_accuracy(a, b);
  for (int c = 0; c < 3; ++c) {
    int right = 0;
    for (int v = 0; v < 32; ++v) {
      for (int u = 0; u < 32; ++u) right += (cls(a, u, v) == c) == (cls(b, u, v) == c);
    }
    EXPECT_NEAR(pa.per_class[c], 100.0 * right / 1024.0, 1e-9);
  }
}

TEST(Raster, MiouIdentityDilationAndExclusion) {
  const LaneImage gt = row_image({100, 200});
  const auto same = miou(gt, gt);
  EXPECT_EQ(same.per_class[1], 1.0);
  EXPECT_FALSE(same.per_class[0].has_value());
  EXPECT_FALSE(same.per_class[2].has_value());
  EXPECT_EQ(same.mean, 1.0);

  const auto thick = miou(dilate(gt, 1), gt);
  EXPECT_NEAR(*thick.per_class[1], 1.0 / 3.0, 1e-12);
  EXPECT_GT(pixel_accuracy(dilate(gt, 1), gt).total, 99.0);

  EXPECT_FALSE(miou(LaneImage(small_tile()), LaneImage(small_tile())).mean.has_value());
  EXPECT_EQ(kind_of([] { miou(LaneImage(small_tile(32)), LaneImage(small_tile(64))); }),
            ErrorKind::kDimensionMismatch);
}

TEST(Raster, CountsSumOverTiles) {
  const LaneImage gt = row_image({10});
  RasterCounts total;
  total += raster_counts(gt, gt);
  total += raster_counts(LaneImage(small_tile()), gt);
  EXPECT_EQ(total.pixels, 2u * 65536u);
  EXPECT_EQ(total.both[1], 256u);
  EXPECT_EQ(total.gt_only[1], 256u);
  EXPECT_DOUBLE_EQ(lane_ratio(total), 100.0 * 512 / (2 * 65536.0));
}

TEST(Raster, LaneCountDiscrepancy) {
  const LaneImage three = row_image({40, 128, 220});
  EXPECT_EQ(lane_count_discrepancy(three, 3), 0u);
  EXPECT_EQ(lane_count_discrepancy(row_image({40, 220}), 3), 1u);
  EXPECT_EQ(lane_count_discrepancy(LaneImage(small_tile()), 0), 0u);
}

TEST(Raster, LaneCountAfterJitterMatchesOracle) {
  // Lanes 5 px apart; jitter scatters pixels into the gap and can bridge them.
  const LaneImage img = row_image({20, 25, 50}, 64);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LaneImage pred = corrupt(img, {0.0, 1.5, 0, seed});
    std::vector<GlobalPoint> px;
    for (const auto& p : extract_lane_pixels(pred)) px.push_back({1.0 * p.pixel.u, 1.0 * p.pixel.v});
    const auto want = oracle::naive_dbscan(px, 3.0, 4).clusters.size();
    const std::size_t d = want > 3 ? want - 3 : 3 - want;
    EXPECT_EQ(lane_count_discrepancy(pred, 3), d);
  }
}

TEST(Report, TextAndJsonKeys) {
  std::mt19937_64 rng(14);
  const HDMap m = random_map(rng, 3);
  auto r = evaluate_maps(m, m);
  const std::string text = to_text(r);
  for (const char* key : {"gt_lanes = 3", "coverage_pct = 100", "accuracy_pct@0.25 = 100",
                          "accuracy_pct@1.5 = 100", "mean_vertex_distance_m = 0"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  const auto j = to_json(r);
  EXPECT_EQ(j["matched"], 3);
  EXPECT_EQ(j["accuracy_pct"][1]["threshold_m"], 1.0);

  const auto none = evaluate_maps(HDMap{}, HDMap{});
  EXPECT_NE(to_text(none).find("coverage_pct = n/a"), std::string::npos);
  EXPECT_TRUE(to_json(none)["coverage_pct"].is_null());
}

}  // namespace
}  // namespace lanemap

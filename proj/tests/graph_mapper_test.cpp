#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "lanemap/error.hpp"
#include "lanemap/graph_mapper.hpp"
#include "support/oracles.hpp"

namespace lanemap {
namespace {

constexpr double kPi = std::numbers::pi;

LanePoint lp(GlobalPoint p, std::uint32_t tile, std::int32_t u, std::int32_t v = 0,
             LaneClass c = LaneClass::kWhite) {
  LanePoint out;
  out.position = p;
  out.source = {tile, {u, v}};
  out.lane_class = c;
  return out;
}

// Single-edge graph whose support is sampled along the segment.
LaneGraph segment_graph(GlobalPoint a, GlobalPoint b, std::uint32_t tile,
                        LaneClass c = LaneClass::kWhite) {
  LaneGraph g;
  const auto pa = lp(a, tile, 0, 0, c);
  const auto pb = lp(b, tile, 1, 0, c);
  g.vertices.push_back({0, a, {{pa.source, a}}});
  g.vertices.push_back({1, b, {{pb.source, b}}});
  Edge e;
  e.endpoints = {0, 1};
  e.lane_class = c;
  for (int i = 0; i <= 10; ++i) e.support_points.push_back(lp(a + (i / 10.0) * (b - a), tile, i + 2, 0, c));
  g.edges.push_back(e);
  return g;
}

std::set<std::uint64_t> support_keys(const LaneGraph& g) {
  std::set<std::uint64_t> keys;
  for (const auto& e : g.edges) {
    for (const auto& p : e.support_points) keys.insert(p.source.key());
  }
  return keys;
}

void expect_same_graph(const LaneGraph& a, const LaneGraph& b) {
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    EXPECT_NEAR(a.vertices[i].position.x, b.vertices[i].position.x, 1e-12);
    EXPECT_NEAR(a.vertices[i].position.y, b.vertices[i].position.y, 1e-12);
    ASSERT_EQ(a.vertices[i].member_endpoints.size(), b.vertices[i].member_endpoints.size());
    for (std::size_t k = 0; k < a.vertices[i].member_endpoints.size(); ++k) {
      EXPECT_EQ(a.vertices[i].member_endpoints[k].source, b.vertices[i].member_endpoints[k].source);
    }
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    EXPECT_EQ(a.edges[i].endpoints, b.edges[i].endpoints);
    EXPECT_EQ(a.edges[i].lane_class, b.edges[i].lane_class);
    ASSERT_EQ(a.edges[i].support_points.size(), b.edges[i].support_points.size());
    for (std::size_t k = 0; k < a.edges[i].support_points.size(); ++k) {
      EXPECT_EQ(a.edges[i].support_points[k].source, b.edges[i].support_points[k].source);
    }
  }
}

TEST(FarthestPair, CollinearExtremes) {
  const std::vector<GlobalPoint> pts{{3, 3}, {0, 0}, {1, 1}, {5, 5}, {2, 2}};
  EXPECT_EQ(farthest_pair(pts), (std::pair<std::size_t, std::size_t>{1, 3}));
}

TEST(FarthestPair, ThreeQuarterArcMatchesOracle) {
  std::vector<GlobalPoint> pts;
  for (int i = 0; i <= 270; ++i) {
    const double t = i * kPi / 180.0;
    pts.push_back({20.0 * std::cos(t), 20.0 * std::sin(t)});
  }
  const auto [i, j] = farthest_pair(pts);
  EXPECT_LT(i, j);
  // Past a half circle the diameter is a pair of opposite points, not the tips.
  EXPECT_DOUBLE_EQ(squared_distance(pts[i], pts[j]), oracle::brute_force_farthest(pts));
  EXPECT_NEAR(distance(pts[i], pts[j]), 40.0, 1e-9);
}

TEST(FarthestPair, ShortArcTips) {
  std::vector<GlobalPoint> pts;
  for (int i = 0; i <= 120; ++i) {
    const double t = i * kPi / 180.0;
    pts.push_back({20.0 * std::cos(t), 20.0 * std::sin(t)});
  }
  EXPECT_EQ(farthest_pair(pts), (std::pair<std::size_t, std::size_t>{0, 120}));
}

TEST(FarthestPair, RandomAgainstOracleWithTies) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 60)(rng);
    std::uniform_int_distribution<int> c(0, trial % 2 ? 4 : 1000);
    std::vector<GlobalPoint> pts;
    for (int k = 0; k < n; ++k) pts.push_back({1.0 * c(rng), 1.0 * c(rng)});
    const auto [i, j] = farthest_pair(pts);
    ASSERT_LT(i, j);
    const double best = oracle::brute_force_farthest(pts);
    EXPECT_EQ(squared_distance(pts[i], pts[j]), best);
    // Lexicographically smallest (i, j) among the maximal pairs.
    std::pair<std::size_t, std::size_t> want{0, 0};
    bool found = false;
    for (std::size_t a = 0; a < pts.size() && !found; ++a) {
      for (std::size_t b = a + 1; b < pts.size() && !found; ++b) {
        if (squared_distance(pts[a], pts[b]) == best) {
          want = {a, b};
          found = true;
        }
      }
    }
    EXPECT_EQ(std::make_pair(i, j), want);
  }
}

TEST(FarthestPair, NeedsTwoPoints) {
  const std::vector<GlobalPoint> one{{0, 0}};
  EXPECT_THROW(farthest_pair(one), Error);
}

TEST(ImageToGraph, TwoClustersGiveTwoEdges) {
  std::vector<LanePoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(lp({0.25 * i, 0.0}, 0, i, 0));
  for (int i = 0; i < 40; ++i) pts.push_back(lp({0.25 * i, 20.0}, 0, i, 1, LaneClass::kYellow));
  const auto r = image_to_graph(pts);
  ASSERT_EQ(r.graph.edges.size(), 2u);
  EXPECT_EQ(r.graph.vertices.size(), 4u);
  validate(r.graph);
  for (const auto& e : r.graph.edges) {
    EXPECT_EQ(e.support_points.size(), 40u);
    const auto& a = r.graph.vertices[e.endpoints.first].position;
    const auto& b = r.graph.vertices[e.endpoints.second].position;
    EXPECT_NEAR(distance(a, b), 9.75, 1e-12);
  }
  EXPECT_EQ(r.graph.edges[1].lane_class, LaneClass::kYellow);
}

TEST(ImageToGraph, CollapsedClusterSkipped) {
  std::vector<LanePoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(lp({1.0, 1.0}, 0, i));
  const auto r = image_to_graph(pts);
  EXPECT_TRUE(r.graph.edges.empty());
  EXPECT_EQ(r.skipped_clusters, 1u);
}

TEST(MergeGraphs, CloseEndpointsJoin) {
  const std::vector<LaneGraph> gs{segment_graph({0, 0}, {10, 0}, 0), segment_graph({10.5, 0}, {20, 0}, 1)};
  const auto r = merge_graphs(gs, 1.0);
  EXPECT_EQ(r.graph.vertices.size(), 3u);
  ASSERT_EQ(r.graph.edges.size(), 2u);
  EXPECT_EQ(r.graph.edges[0].endpoints.second, r.graph.edges[1].endpoints.first);
  EXPECT_NEAR(r.graph.vertices[1].position.x, 10.25, 1e-12);
  validate(r.graph);
}

TEST(MergeGraphs, FarEndpointsStayApart) {
  const std::vector<LaneGraph> gs{segment_graph({0, 0}, {10, 0}, 0), segment_graph({11.5, 0}, {20, 0}, 1)};
  const auto r = merge_graphs(gs, 1.0);
  EXPECT_EQ(r.graph.vertices.size(), 4u);
  EXPECT_EQ(r.graph.edges.size(), 2u);
}

TEST(MergeGraphs, OverlappingTilesFormOnePath) {
  // Tile k sees the lane over [2k, 2k + 10] as a path of 2 m pieces, with
  // per-tile position noise.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  std::vector<LaneGraph> gs;
  for (int k = 0; k < 50; ++k) {
    LaneGraph g;
    for (int i = 0; i <= 5; ++i) {
      const GlobalPoint p{2.0 * (k + i) + noise(rng), noise(rng)};
      g.vertices.push_back({i, p, {{lp(p, k, 500 + i).source, p}}});
    }
    for (int i = 0; i < 5; ++i) {
      Edge e;
      e.id = i;
      e.endpoints = {i, i + 1};
      e.support_points.push_back(lp(0.5 * (g.vertices[i].position + g.vertices[i + 1].position), k, i));
      g.edges.push_back(e);
    }
    gs.push_back(g);
  }
  const auto r = merge_graphs(gs, 1.0);
  EXPECT_EQ(r.graph.edges.size(), 54u);

  // Independent union-find over every input endpoint.
  std::vector<GlobalPoint> ends;
  for (const auto& g : gs) {
    for (const auto& v : g.vertices) ends.push_back(v.position);
  }
  std::vector<std::size_t> parent(ends.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      if (distance(ends[i], ends[j]) <= 1.0) parent[find(i)] = find(j);
    }
  }
  std::set<std::size_t> comps;
  for (std::size_t i = 0; i < ends.size(); ++i) comps.insert(find(i));
  EXPECT_EQ(r.graph.vertices.size(), comps.size());
  EXPECT_EQ(comps.size(), 55u);

  // Path-connected: BFS from vertex 0 reaches everything.
  std::vector<std::vector<std::int64_t>> adj(r.graph.vertices.size());
  for (const auto& e : r.graph.edges) {
    adj[e.endpoints.first].push_back(e.endpoints.second);
    adj[e.endpoints.second].push_back(e.endpoints.first);
  }
  std::vector<bool> seen(adj.size());
  std::queue<std::int64_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        q.push(w);
      }
    }
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST(MergeGraphs, TransitiveClosure) {
  std::vector<LaneGraph> gs;
  for (int i = 0; i < 4; ++i) gs.push_back(segment_graph({0.8 * i, 0}, {0.8 * i, 50.0 + 5 * i}, i));
  const auto r = merge_graphs(gs, 1.0);
  // 0, 0.8, 1.6, 2.4 chain together although the ends are 2.4 m apart.
  EXPECT_EQ(r.graph.vertices.size(), 5u);
  const auto hub = std::count_if(r.graph.vertices.begin(), r.graph.vertices.end(),
                                 [](const Vertex& v) { return v.member_endpoints.size() == 4; });
  EXPECT_EQ(hub, 1);
}

TEST(MergeGraphs, NoTwoVerticesWithinRadius) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(0, 30);
  std::vector<LaneGraph> gs;
  for (int i = 0; i < 40; ++i) gs.push_back(segment_graph({c(rng), c(rng)}, {c(rng), c(rng)}, i));
  const auto r = merge_graphs(gs, 1.0);
  for (std::size_t i = 0; i < r.graph.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < r.graph.vertices.size(); ++j) {
      EXPECT_GT(distance(r.graph.vertices[i].position, r.graph.vertices[j].position), 1.0);
    }
  }
  // Support is never lost: kept edges plus dropped loops cover every input point.
  std::set<std::uint64_t> in;
  for (const auto& g : gs) {
    const auto k = support_keys(g);
    in.insert(k.begin(), k.end());
  }
  auto out = support_keys(r.graph);
  for (const auto& p : r.dropped_support) out.insert(p.source.key());
  EXPECT_EQ(in, out);
  validate(r.graph);
}

TEST(MergeGraphs, Idempotent) {
  std::vector<LaneGraph> gs;
  for (int k = 0; k < 10; ++k) gs.push_back(segment_graph({3.0 * k, 0.1 * k}, {3.0 * k + 9, 0.0}, k));
  const auto once = merge_graphs(gs, 1.0);
  const std::vector<LaneGraph> again{once.graph};
  expect_same_graph(merge_graphs(again, 1.0).graph, once.graph);
  const std::vector<LaneGraph> twice{once.graph, once.graph};
  const auto doubled = merge_graphs(twice, 1.0);
  expect_same_graph(doubled.graph, once.graph);
  EXPECT_EQ(doubled.merged_parallel, once.graph.edges.size());
}

TEST(MergeGraphs, LoopsDroppedAndParallelsFused) {
  // A short edge whose ends collapse, plus two parallel observations.
  const std::vector<LaneGraph> gs{segment_graph({0, 0}, {0.5, 0}, 0), segment_graph({10, 0}, {20, 0}, 1),
                                  segment_graph({10.2, 0}, {19.9, 0}, 2)};
  const auto r = merge_graphs(gs, 1.0);
  EXPECT_EQ(r.dropped_loops, 1u);
  EXPECT_EQ(r.dropped_support.size(), 11u);
  EXPECT_EQ(r.merged_parallel, 1u);
  ASSERT_EQ(r.graph.edges.size(), 1u);
  EXPECT_EQ(r.graph.edges[0].support_points.size(), 22u);
}

TEST(MergeGraphs, DifferentClassesNotFused) {
  const std::vector<LaneGraph> gs{segment_graph({10, 0}, {20, 0}, 1, LaneClass::kWhite),
                                  segment_graph({10, 0}, {20, 0}, 2, LaneClass::kYellow)};
  const auto r = merge_graphs(gs, 1.0);
  EXPECT_EQ(r.graph.edges.size(), 2u);
  EXPECT_EQ(r.merged_parallel, 0u);
}

TEST(MergeGraphs, EmptyInput) {
  const auto r = merge_graphs({}, 1.0);
  EXPECT_TRUE(r.graph.vertices.empty());
  EXPECT_TRUE(r.graph.edges.empty());
  EXPECT_THROW(merge_graphs({}, -1.0), Error);
}

}  // namespace
}  // namespace lanemap

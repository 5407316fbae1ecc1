#include "lanemap/map_merger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "lanemap/error.hpp"
#include "lanemap/simplify.hpp"

namespace lanemap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<std::size_t>> neighbor_lists(std::span<const GlobalPoint> pts, double radius) {
  const double cell = radius * (1.0 + 1e-9);
  const double r2 = radius * radius;
  auto cell_of = [&](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < pts.size(); ++i) grid[{cell_of(pts[i].x), cell_of(pts[i].y)}].push_back(i);
  std::vector<std::vector<std::size_t>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto cx = cell_of(pts[i].x);
    const auto cy = cell_of(pts[i].y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (const std::size_t j : it->second) {
          if (j != i && squared_distance(pts[i], pts[j]) <= r2) out[i].push_back(j);
        }
      }
    }
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<std::size_t> prev;
};

ShortestPaths dijkstra(std::span<const GlobalPoint> pts, const std::vector<std::vector<std::size_t>>& nbrs,
                       std::size_t source) {
  ShortestPaths sp{std::vector<double>(pts.size(), kInf), std::vector<std::size_t>(pts.size(), source)};
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  sp.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > sp.dist[i]) continue;
    for (const std::size_t j : nbrs[i]) {
      const double nd = d + distance(pts[i], pts[j]);
      if (nd < sp.dist[j]) {
        sp.dist[j] = nd;
        sp.prev[j] = i;
        heap.emplace(nd, j);
      }
    }
  }
  return sp;
}

std::size_t farthest_reached(const ShortestPaths& sp) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < sp.dist.size(); ++i) {
    if (std::isfinite(sp.dist[i]) && sp.dist[i] > best_d) {
      best_d = sp.dist[i];
      best = i;
    }
  }
  return best;
}

std::vector<GlobalPoint> geodesic_order(std::span<const GlobalPoint> pts, GlobalPoint axis_start,
                                        double radius) {
  std::size_t seed = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (squared_distance(pts[i], axis_start) < squared_distance(pts[seed], axis_start)) seed = i;
  }
  const auto nbrs = neighbor_lists(pts, radius);
  const std::size_t f1 = farthest_reached(dijkstra(pts, nbrs, seed));
  const ShortestPaths from_f1 = dijkstra(pts, nbrs, f1);
  std::vector<GlobalPoint> path;
  for (std::size_t at = farthest_reached(from_f1);; at = from_f1.prev[at]) {
    path.push_back(pts[at]);
    if (at == f1) break;
  }
  // path currently runs f2 -> f1; start at the end nearer axis_start.
  if (squared_distance(path.front(), axis_start) > squared_distance(path.back(), axis_start)) {
    std::reverse(path.begin(), path.end());
  }
  return path;
}

std::vector<GlobalPoint> positions_of(std::span<const LanePoint> points) {
  std::vector<GlobalPoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(p.position);
  return pts;
}

Lane make_lane(const LaneCluster& cluster, std::vector<GlobalPoint> ordered, const std::string& road_id,
               const MergerParams& params) {
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  Lane lane;
  lane.polyline = douglas_peucker(ordered, params.simplify_tolerance);
  lane.lane_class = cluster.lane_class;
  lane.road_id = road_id;
  lane.cluster_id = cluster.id;
  return lane;
}

}  // namespace

void validate(const MergerParams& params) {
  if (!(params.simplify_tolerance >= 0.0) || !std::isfinite(params.simplify_tolerance)) {
    throw Error(ErrorKind::kConfig, "simplify_tolerance must be finite and >= 0");
  }
  if (!(params.inversion_step > 0.0)) throw Error(ErrorKind::kConfig, "inversion_step must be > 0");
  if (!(params.inversion_fraction >= 0.0 && params.inversion_fraction <= 1.0)) {
    throw Error(ErrorKind::kConfig, "inversion_fraction must lie in [0, 1]");
  }
  if (!(params.chain_radius > 0.0)) throw Error(ErrorKind::kConfig, "chain_radius must be > 0");
  if (!(params.sparse_fraction >= 0.0 && params.sparse_fraction <= 1.0)) {
    throw Error(ErrorKind::kConfig, "sparse_fraction must lie in [0, 1]");
  }
  if (!(params.density_radius > 0.0)) throw Error(ErrorKind::kConfig, "density_radius must be > 0");
}

std::vector<LanePoint> drop_sparse_points(std::span<const LanePoint> points,
                                          std::span<const std::uint32_t> multiplicity,
                                          const MergerParams& params) {
  if (!multiplicity.empty() && multiplicity.size() != points.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "multiplicity must match the point count");
  }
  if (params.sparse_fraction <= 0.0 || points.size() < 3) return {points.begin(), points.end()};
  auto weight = [&](std::size_t i) -> std::uint64_t { return multiplicity.empty() ? 1 : multiplicity[i]; };
  const auto nbrs = neighbor_lists(positions_of(points), params.density_radius);
  std::vector<std::uint64_t> counts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    counts[i] = weight(i);
    for (const std::size_t j : nbrs[i]) counts[i] += weight(j);
  }
  std::vector<std::uint64_t> sorted = counts;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double floor_count = params.sparse_fraction * static_cast<double>(sorted[sorted.size() / 2]);
  std::vector<LanePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<double>(counts[i]) >= floor_count) out.push_back(points[i]);
  }
  return out;
}

WeightMatrix sharing_matrix(std::span<const LaneCluster> clusters, const LaneGraph& graph) {
  WeightMatrix w(clusters.size(), graph.edges.size());
  std::unordered_map<std::uint64_t, std::size_t> cluster_of;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const auto& p : clusters[i].points) cluster_of.emplace(p.source.key(), i);
  }
  for (std::size_t j = 0; j < graph.edges.size(); ++j) {
    std::vector<std::uint64_t> keys;
    keys.reserve(graph.edges[j].support_points.size());
    for (const auto& p : graph.edges[j].support_points) keys.push_back(p.source.key());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto k : keys) {
      const auto it = cluster_of.find(k);
      if (it != cluster_of.end()) w(it->second, j) += 1.0;
    }
  }
  return w;
}

std::vector<GlobalPoint> order_lane_points(std::span<const LanePoint> points, GlobalPoint axis_start,
                                           GlobalPoint axis_end, const MergerParams& params) {
  std::vector<GlobalPoint> pts = positions_of(points);
  if (pts.size() < 2) return pts;

  const GlobalPoint axis = axis_end - axis_start;
  const double len = norm(axis);
  if (len > 0.0) {
    std::vector<double> proj(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) proj[i] = dot(pts[i] - axis_start, axis) / len;
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
    const double step2 = params.inversion_step * params.inversion_step;
    std::size_t inversions = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      if (squared_distance(pts[order[k]], pts[order[k + 1]]) > step2) ++inversions;
    }
    if (static_cast<double>(inversions) <= params.inversion_fraction * static_cast<double>(order.size() - 1)) {
      std::vector<GlobalPoint> out;
      out.reserve(order.size());
      for (const std::size_t i : order) out.push_back(pts[i]);
      return out;
    }
  }
  return geodesic_order(pts, axis_start, params.chain_radius);
}

RoadLanes merge_road(std::span<const LaneCluster> clusters, const LaneGraph& graph, const std::string& road_id,
                     const MergerParams& params) {
  validate(params);
  RoadLanes out;
  out.road_id = road_id;
  out.stats.road_id = road_id;
  out.stats.clusters = static_cast<std::int64_t>(clusters.size());
  out.stats.edges = static_cast<std::int64_t>(graph.edges.size());
  if (!clusters.empty() && !graph.edges.empty()) {
    const WeightMatrix w = sharing_matrix(clusters, graph);
    for (const auto& [i, j] : max_assignment(w).pairs) {
      if (w(i, j) <= 0.0) continue;
      const Edge& edge = graph.edges[j];
      const GlobalPoint a = graph.vertices[static_cast<std::size_t>(edge.endpoints.first)].position;
      const GlobalPoint b = graph.vertices[static_cast<std::size_t>(edge.endpoints.second)].position;
      const auto kept = drop_sparse_points(clusters[i].points, clusters[i].multiplicity, params);
      Lane lane = make_lane(clusters[i], order_lane_points(kept, a, b, params), road_id, params);
      if (lane.polyline.size() < 2) continue;
      lane.edge_id = edge.id;
      out.lanes.push_back(std::move(lane));
    }
  }
  out.stats.lanes = static_cast<std::int64_t>(out.lanes.size());
  out.stats.unmatched_clusters = out.stats.clusters - out.stats.lanes;
  out.stats.unmatched_edges = out.stats.edges - out.stats.lanes;
  return out;
}

RoadLanes cluster_only_road(std::span<const LaneCluster> clusters, const std::string& road_id,
                            const MergerParams& params) {
  validate(params);
  RoadLanes out;
  out.road_id = road_id;
  out.stats.road_id = road_id;
  out.stats.clusters = static_cast<std::int64_t>(clusters.size());
  for (const auto& cluster : clusters) {
    const auto kept = drop_sparse_points(cluster.points, cluster.multiplicity, params);
    if (kept.size() < 2) continue;
    const std::vector<GlobalPoint> pts = positions_of(kept);
    const auto [a, b] = farthest_pair(pts);
    if (pts[a] == pts[b]) continue;
    Lane lane = make_lane(cluster, order_lane_points(kept, pts[a], pts[b], params), road_id, params);
    if (lane.polyline.size() >= 2) out.lanes.push_back(std::move(lane));
  }
  out.stats.lanes = static_cast<std::int64_t>(out.lanes.size());
  out.stats.unmatched_clusters = out.stats.clusters - out.stats.lanes;
  return out;
}

HDMap assemble_hd_map(std::vector<RoadLanes> per_road, const CoordinateFrame& frame) {
  std::stable_sort(per_road.begin(), per_road.end(),
                   [](const RoadLanes& a, const RoadLanes& b) { return a.road_id < b.road_id; });
  HDMap map;
  map.frame = frame;
  LaneId next = 0;
  for (auto& road : per_road) {
    for (auto& lane : road.lanes) {
      lane.id = next++;
      map.lanes.push_back(std::move(lane));
    }
    map.road_stats.push_back(std::move(road.stats));
  }
  return map;
}

}  // namespace lanemap

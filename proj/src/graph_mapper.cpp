#include "lanemap/graph_mapper.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "lanemap/cluster_mapper.hpp"
#include "lanemap/error.hpp"

namespace lanemap {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Calls fn(i, j) for every i < j with |p_i - p_j| <= radius.
template <typename Fn>
void for_each_close_pair(std::span<const GlobalPoint> pts, double radius, Fn&& fn) {
  const double cell = radius * (1.0 + 1e-9);
  const double r2 = radius * radius;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> grid;
  auto cell_of = [&](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
  for (std::size_t i = 0; i < pts.size(); ++i) grid[{cell_of(pts[i].x), cell_of(pts[i].y)}].push_back(i);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto cx = cell_of(pts[i].x);
    const auto cy = cell_of(pts[i].y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (const std::size_t j : it->second) {
          if (j > i && squared_distance(pts[i], pts[j]) <= r2) fn(i, j);
        }
      }
    }
  }
}

GlobalPoint centroid(const std::vector<EndpointRef>& members) {
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& m : members) {
    sx += m.position.x;
    sy += m.position.y;
  }
  const auto n = static_cast<double>(members.size());
  return {sx / n, sy / n};
}

void sort_unique_members(std::vector<EndpointRef>& members) {
  std::sort(members.begin(), members.end(), [](const EndpointRef& a, const EndpointRef& b) {
    return a.source.key() < b.source.key();
  });
  members.erase(std::unique(members.begin(), members.end(),
                            [](const EndpointRef& a, const EndpointRef& b) {
                              return a.source.key() == b.source.key();
                            }),
                members.end());
}

void sort_unique_support(std::vector<LanePoint>& support) {
  std::sort(support.begin(), support.end(), [](const LanePoint& a, const LanePoint& b) {
    return a.source.key() < b.source.key();
  });
  support.erase(std::unique(support.begin(), support.end(),
                            [](const LanePoint& a, const LanePoint& b) {
                              return a.source.key() == b.source.key();
                            }),
                support.end());
}

}  // namespace

std::pair<std::size_t, std::size_t> farthest_pair(std::span<const GlobalPoint> points) {
  if (points.size() < 2) {
    throw Error(ErrorKind::kInputDomain, "farthest_pair needs at least 2 points");
  }
  // Unique coordinates, each represented by its smallest input index.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    if (points[a].y != points[b].y) return points[a].y < points[b].y;
    return a < b;
  });
  std::vector<std::size_t> unique;
  for (const std::size_t i : order) {
    if (unique.empty() || !(points[unique.back()] == points[i])) unique.push_back(i);
  }
  if (unique.size() == 1) return {0, 1};

  // Monotone-chain hull.  Near-collinear points are kept so rounding can never
  // discard a true extreme point; the candidate set is then a superset.
  double scale = 0.0;
  for (const std::size_t i : unique) {
    scale = std::max({scale, std::abs(points[i].x - points[unique[0]].x),
                      std::abs(points[i].y - points[unique[0]].y)});
  }
  const double tol = 1e-12 * scale * scale;
  auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross(points[a] - points[o], points[b] - points[o]);
  };
  std::vector<std::size_t> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    auto visit = [&](std::size_t i) {
      while (hull.size() >= base + 2 && turn(hull[hull.size() - 2], hull.back(), i) < -tol) {
        hull.pop_back();
      }
      hull.push_back(i);
    };
    if (pass == 0) {
      for (const std::size_t i : unique) visit(i);
    } else {
      for (auto it = unique.rbegin(); it != unique.rend(); ++it) visit(*it);
    }
  }
  std::sort(hull.begin(), hull.end());
  hull.erase(std::unique(hull.begin(), hull.end()), hull.end());

  std::pair<std::size_t, std::size_t> best{hull[0], hull[1]};
  double best_d2 = -1.0;
  for (std::size_t a = 0; a < hull.size(); ++a) {
    for (std::size_t b = a + 1; b < hull.size(); ++b) {
      const double d2 = squared_distance(points[hull[a]], points[hull[b]]);
      const std::pair<std::size_t, std::size_t> cand{hull[a], hull[b]};  // hull is ascending
      if (d2 > best_d2 || (d2 == best_d2 && cand < best)) {
        best = cand;
        best_d2 = d2;
      }
    }
  }
  return best;
}

ImageGraphResult image_to_graph(std::span<const LanePoint> points, const DbscanParams& params) {
  ImageGraphResult result;
  std::vector<LanePoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);
  std::vector<GlobalPoint> positions;
  positions.reserve(sorted.size());
  for (const auto& p : sorted) positions.push_back(p.position);
  const auto db = dbscan(positions, params);
  result.noise_points = db.noise.size();

  for (const auto& members : db.clusters) {
    std::vector<GlobalPoint> cluster_pos;
    cluster_pos.reserve(members.size());
    for (const std::size_t idx : members) cluster_pos.push_back(positions[idx]);
    if (members.size() < 2) {
      ++result.skipped_clusters;
      continue;
    }
    const auto [a, b] = farthest_pair(cluster_pos);
    if (cluster_pos[a] == cluster_pos[b]) {
      ++result.skipped_clusters;
      continue;
    }
    auto& g = result.graph;
    const auto va = static_cast<std::int64_t>(g.vertices.size());
    const LanePoint& pa = sorted[members[a]];
    const LanePoint& pb = sorted[members[b]];
    g.vertices.push_back({va, pa.position, {{pa.source, pa.position}}});
    g.vertices.push_back({va + 1, pb.position, {{pb.source, pb.position}}});
    Edge edge;
    edge.id = static_cast<std::int64_t>(g.edges.size());
    edge.endpoints = {va, va + 1};
    edge.support_points.reserve(members.size());
    for (const std::size_t idx : members) edge.support_points.push_back(sorted[idx]);
    edge.lane_class = majority_class(edge.support_points);
    sort_unique_support(edge.support_points);
    g.edges.push_back(std::move(edge));
  }
  return result;
}

MergeResult merge_graphs(std::span<const LaneGraph> graphs, double merge_radius) {
  if (!(merge_radius >= 0.0)) throw Error(ErrorKind::kInputDomain, "merge_radius must be >= 0");
  for (const auto& g : graphs) validate(g);

  // Flatten input vertices.
  std::vector<std::size_t> offset(graphs.size() + 1, 0);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    offset[gi + 1] = offset[gi] + graphs[gi].vertices.size();
  }
  const std::size_t n = offset.back();
  std::vector<std::vector<EndpointRef>> members(n);
  std::vector<GlobalPoint> positions(n);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (const auto& v : graphs[gi].vertices) {
      const std::size_t flat = offset[gi] + static_cast<std::size_t>(v.id);
      members[flat] = v.member_endpoints;
      positions[flat] = v.position;
    }
  }

  DisjointSet sets(n);
  for_each_close_pair(positions, merge_radius, [&](std::size_t i, std::size_t j) { sets.unite(i, j); });

  // Re-merge until no two merged vertices are within merge_radius.
  std::vector<std::size_t> roots;
  std::vector<std::vector<EndpointRef>> comp_members;
  std::vector<GlobalPoint> comp_pos;
  for (;;) {
    std::unordered_map<std::size_t, std::size_t> comp_of_root;
    roots.clear();
    comp_members.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = sets.find(i);
      auto [it, inserted] = comp_of_root.try_emplace(r, roots.size());
      if (inserted) {
        roots.push_back(r);
        comp_members.emplace_back();
      }
      auto& dst = comp_members[it->second];
      dst.insert(dst.end(), members[i].begin(), members[i].end());
    }
    comp_pos.assign(roots.size(), {});
    for (std::size_t c = 0; c < roots.size(); ++c) {
      sort_unique_members(comp_members[c]);
      comp_pos[c] = comp_members[c].empty() ? positions[roots[c]] : centroid(comp_members[c]);
    }
    bool changed = false;
    for_each_close_pair(comp_pos, merge_radius, [&](std::size_t a, std::size_t b) {
      changed |= sets.unite(roots[a], roots[b]);
    });
    if (!changed) break;
  }

  // Canonical vertex order: centroid x, y, then smallest member key.
  std::vector<std::size_t> comp_order(roots.size());
  std::iota(comp_order.begin(), comp_order.end(), 0);
  auto first_key = [&](std::size_t c) {
    return comp_members[c].empty() ? ~0ULL : comp_members[c].front().source.key();
  };
  std::sort(comp_order.begin(), comp_order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(comp_pos[a].x, comp_pos[a].y, first_key(a), roots[a]) <
           std::make_tuple(comp_pos[b].x, comp_pos[b].y, first_key(b), roots[b]);
  });
  std::unordered_map<std::size_t, std::int64_t> vertex_of_root;
  MergeResult result;
  for (std::size_t rank = 0; rank < comp_order.size(); ++rank) {
    const std::size_t c = comp_order[rank];
    vertex_of_root[roots[c]] = static_cast<std::int64_t>(rank);
    result.graph.vertices.push_back(
        {static_cast<std::int64_t>(rank), comp_pos[c], std::move(comp_members[c])});
  }

  // Rewire edges; fuse parallels; drop loops.
  std::map<std::tuple<std::int64_t, std::int64_t, int>, Edge> fused;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (const auto& e : graphs[gi].edges) {
      std::int64_t a = vertex_of_root.at(sets.find(offset[gi] + static_cast<std::size_t>(e.endpoints.first)));
      std::int64_t b = vertex_of_root.at(sets.find(offset[gi] + static_cast<std::size_t>(e.endpoints.second)));
      if (a == b) {
        ++result.dropped_loops;
        result.dropped_support.insert(result.dropped_support.end(), e.support_points.begin(),
                                      e.support_points.end());
        continue;
      }
      if (b < a) std::swap(a, b);
      const auto key = std::make_tuple(a, b, static_cast<int>(e.lane_class));
      auto [it, inserted] = fused.try_emplace(key);
      Edge& dst = it->second;
      if (inserted) {
        dst.endpoints = {a, b};
        dst.lane_class = e.lane_class;
      } else {
        ++result.merged_parallel;
      }
      dst.support_points.insert(dst.support_points.end(), e.support_points.begin(),
                                e.support_points.end());
    }
  }
  for (auto& [key, edge] : fused) {
    sort_unique_support(edge.support_points);
    edge.id = static_cast<std::int64_t>(result.graph.edges.size());
    result.graph.edges.push_back(std::move(edge));
  }
  return result;
}

void validate(const LaneGraph& graph) {
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    if (graph.vertices[i].id != static_cast<std::int64_t>(i)) {
      throw Error(ErrorKind::kInputDomain, "vertex ids must equal their index");
    }
  }
  const auto nv = static_cast<std::int64_t>(graph.vertices.size());
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& e = graph.edges[i];
    if (e.id != static_cast<std::int64_t>(i)) {
      throw Error(ErrorKind::kInputDomain, "edge ids must equal their index");
    }
    if (e.endpoints.first < 0 || e.endpoints.first >= nv || e.endpoints.second < 0 ||
        e.endpoints.second >= nv) {
      throw Error(ErrorKind::kInputDomain, "edge references a missing vertex");
    }
    if (e.endpoints.first == e.endpoints.second) {
      throw Error(ErrorKind::kInputDomain, "edge is a loop");
    }
    if (e.support_points.empty()) throw Error(ErrorKind::kInputDomain, "edge has no support");
  }
}

}  // namespace lanemap

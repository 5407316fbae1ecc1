#include "lanemap/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

// Uniform grid over the points with cells slightly larger than eps, so every
// eps-neighbor sits in the 3x3 block around a point's cell.
class NeighborGrid {
 public:
  NeighborGrid(std::span<const GlobalPoint> points, double eps)
      : points_(points), eps2_(eps * eps), cell_(eps * (1.0 + 1e-9)) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key(cell_of(points[i].x), cell_of(points[i].y))].push_back(i);
    }
  }

  template <typename Fn>
  void for_each_neighbor(std::size_t i, Fn&& fn) const {
    const GlobalPoint p = points_[i];
    const std::int64_t cx = cell_of(p.x);
    const std::int64_t cy = cell_of(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const std::size_t j : it->second) {
          const double ddx = points_[j].x - p.x;
          const double ddy = points_[j].y - p.y;
          if (ddx * ddx + ddy * ddy <= eps2_) fn(j);
        }
      }
    }
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  using CellKey = std::pair<std::int64_t, std::int64_t>;
  static CellKey key(std::int64_t cx, std::int64_t cy) { return {cx, cy}; }

  struct CellHash {
    std::size_t operator()(const CellKey& k) const {
      const auto h = static_cast<std::uint64_t>(k.first) * 0x9E3779B97F4A7C15ULL ^
                     static_cast<std::uint64_t>(k.second);
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  std::span<const GlobalPoint> points_;
  double eps2_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

void validate(const DbscanParams& params) {
  if (!(params.eps > 0.0) || !std::isfinite(params.eps)) {
    throw Error(ErrorKind::kInputDomain, "dbscan eps must be > 0");
  }
  if (params.min_pts < 1) throw Error(ErrorKind::kInputDomain, "dbscan min_pts must be >= 1");
}

DbscanResult dbscan(std::span<const GlobalPoint> points, const DbscanParams& params) {
  validate(params);
  const std::size_t n = points.size();
  DbscanResult result;
  if (n == 0) return result;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kInputDomain, "dbscan input must be finite");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    if (points[a].y != points[b].y) return points[a].y < points[b].y;
    return a < b;
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  const NeighborGrid grid(points, params.eps);

  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    grid.for_each_neighbor(i, [&](std::size_t) { ++count; });
    core[i] = count >= params.min_pts;
  }

  constexpr auto kUnlabeled = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kUnlabeled);
  std::size_t next_label = 0;
  std::vector<std::size_t> stack;
  for (const std::size_t seed : order) {
    if (!core[seed] || label[seed] != kUnlabeled) continue;
    const std::size_t id = next_label++;
    label[seed] = id;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      grid.for_each_neighbor(i, [&](std::size_t j) {
        if (core[j] && label[j] == kUnlabeled) {
          label[j] = id;
          stack.push_back(j);
        }
      });
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    std::size_t best_rank = kUnlabeled;
    grid.for_each_neighbor(i, [&](std::size_t j) {
      if (core[j] && rank[j] < best_rank) best_rank = rank[j];
    });
    if (best_rank != kUnlabeled) label[i] = label[order[best_rank]];
  }

  result.clusters.resize(next_label);
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kUnlabeled) {
      result.noise.push_back(i);
    } else {
      result.clusters[label[i]].push_back(i);
    }
  }
  return result;
}

}  // namespace lanemap

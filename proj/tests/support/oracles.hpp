#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance suite.  Deliberately naive: no grids, no potentials.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "lanemap/assignment.hpp"
#include "lanemap/dbscan.hpp"
#include "lanemap/geo.hpp"

namespace lanemap::oracle {

struct Partition {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
};

// O(n^2) DBSCAN.  Components of core points are numbered in canonical
// (x, y, index) order of their smallest member; a border point goes to the
// cluster of its canonically smallest core neighbor.
inline Partition naive_dbscan(const std::vector<GlobalPoint>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  auto near = [&](std::size_t i, std::size_t j) {
    const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
    return dx * dx + dy * dy <= eps * eps;
  };
  auto before = [&](std::size_t a, std::size_t b) {
    if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
    if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
    return a < b;
  };
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += near(i, j);
    core[i] = c >= min_pts;
  }
  // Connected components among core points by breadth-first search.
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> comp(n, kUnset);
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || comp[s] != kUnset) continue;
    std::vector<std::size_t> frontier{s};
    comp[s] = s;
    while (!frontier.empty()) {
      const std::size_t i = frontier.back();
      frontier.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && comp[j] == kUnset && near(i, j)) {
          comp[j] = s;
          frontier.push_back(j);
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), before);

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label_of_comp(n, kNone);  // indexed by component seed
  std::size_t labels = 0;
  for (std::size_t i : order) {
    if (core[i] && label_of_comp[comp[i]] == kNone) label_of_comp[comp[i]] = labels++;
  }
  Partition out;
  out.clusters.resize(labels);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t label = kNone;
    if (core[i]) {
      label = label_of_comp[comp[i]];
    } else {
      std::optional<std::size_t> best;
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && near(i, j) && (!best || before(j, *best))) best = j;
      }
      if (best) label = label_of_comp[comp[*best]];
    }
    if (label == kNone) {
      out.noise.push_back(i);
    } else {
      out.clusters[label].push_back(i);
    }
  }
  return out;
}

// Exhaustive optimum over every injective row->column map of the smaller side.
inline double brute_force_optimum(const WeightMatrix& w, bool maximize) {
  const std::size_t r = w.rows(), c = w.cols();
  if (r == 0 || c == 0) return 0.0;
  const bool transpose = r > c;
  const std::size_t small = transpose ? c : r;
  const std::size_t large = transpose ? r : c;
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) total += transpose ? w(perm[i], i) : w(i, perm[i]);
    best = maximize ? std::max(best, total) : std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double brute_force_farthest(const std::vector<GlobalPoint>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, squared_distance(pts[i], pts[j]));
  }
  return best;
}

}  // namespace lanemap::oracle

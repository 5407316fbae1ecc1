#include "lanemap/simplify.hpp"

#include <utility>

#include "lanemap/error.hpp"

namespace lanemap {

std::vector<GlobalPoint> douglas_peucker(std::span<const GlobalPoint> polyline, double tolerance) {
  if (!(tolerance >= 0.0)) throw Error(ErrorKind::kInputDomain, "tolerance must be >= 0");
  const std::size_t n = polyline.size();
  if (n <= 2) return {polyline.begin(), polyline.end()};

  std::vector<char> keep(n, 0);
  keep.front() = keep.back() = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(polyline[i], polyline[lo], polyline[hi]);
      if (d > worst) {
        worst = d;
        at = i;
      }
    }
    if (worst > tolerance) {
      keep[at] = 1;
      stack.emplace_back(lo, at);
      stack.emplace_back(at, hi);
    }
  }
  std::vector<GlobalPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(polyline[i]);
  }
  return out;
}

}  // namespace lanemap

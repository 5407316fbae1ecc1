#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lanemap/geo.hpp"

namespace lanemap {

struct DbscanParams {
  double eps = 10.0;   // meters (or pixels for raster-space clustering)
  std::size_t min_pts = 6;

  friend bool operator==(const DbscanParams&, const DbscanParams&) = default;
};

void validate(const DbscanParams& params);

struct DbscanResult {
  // Each cluster lists input indices in ascending order; clusters are ordered
  // by their first core point in canonical order.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;  // ascending
};

// Standard DBSCAN.  A point is core when at least min_pts points (itself
// included) lie within eps.  Clusters are the eps-connected components of core
// points; a border point joins the cluster of its first core neighbor in
// canonical order (x, then y, then input index).
DbscanResult dbscan(std::span<const GlobalPoint> points, const DbscanParams& params);

}  // namespace lanemap

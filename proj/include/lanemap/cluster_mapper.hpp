#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lanemap/dbscan.hpp"
#include "lanemap/lane_raster.hpp"

namespace lanemap {

// DB(P, 6, 10): min_pts 6, eps 10 m.
inline constexpr DbscanParams kClusterMapperDefaults{10.0, 6};
// Half of the default 0.25 m pixel.
inline constexpr double kDefaultDedupCell = 0.125;

struct LaneCluster {
  std::int64_t id = 0;
  std::vector<LanePoint> points;  // canonical order
  // Raw input points folded into each entry of `points` by the dedup step.
  std::vector<std::uint32_t> multiplicity;
  LaneClass lane_class = LaneClass::kWhite;
  std::uint32_t road = 0;
};

struct ClusterMapperResult {
  std::vector<LaneCluster> clusters;
  std::size_t input_points = 0;
  std::size_t duplicates_removed = 0;
  std::size_t noise_points = 0;
  DbscanParams params;
};

// Canonical lane point order: x, then y, then provenance.
bool canonical_less(const LanePoint& a, const LanePoint& b);

// Keeps one point per dedup_cell x dedup_cell grid cell (the one with the
// smallest provenance key); output in canonical order.  `multiplicity`, when
// given, receives the number of input points in each kept point's cell.
std::vector<LanePoint> dedup_lane_points(std::span<const LanePoint> points, double dedup_cell,
                                         std::vector<std::uint32_t>* multiplicity = nullptr);

LaneClass majority_class(std::span<const LanePoint> points);

// Clustering-based mapper for one road: union of every tile's lane points,
// grid dedup, then DBSCAN.  Noise is dropped and counted.
ClusterMapperResult cluster_road_lanes(std::span<const LanePoint> road_points,
                                       const DbscanParams& params = kClusterMapperDefaults,
                                       double dedup_cell = kDefaultDedupCell);

}  // namespace lanemap

#pragma once

#include <span>
#include <string>
#include <vector>

#include "lanemap/assignment.hpp"
#include "lanemap/cluster_mapper.hpp"
#include "lanemap/graph_mapper.hpp"
#include "lanemap/hd_map.hpp"

namespace lanemap {

struct MergerParams {
  double simplify_tolerance = 0.1;  // meters
  // Projection ordering is abandoned for geodesic ordering when more than
  // inversion_fraction of consecutive steps jump farther than inversion_step.
  double inversion_step = 1.0;
  double inversion_fraction = 0.05;
  double chain_radius = 1.0;  // neighbor radius of the geodesic ordering
  // Points whose evidence within density_radius (raw points, counted through
  // the dedup multiplicity) is below sparse_fraction of the cluster median are
  // left out of the lane.  Position noise smears lane ends outward; at a true
  // end the evidence is about half the median.  0 disables.
  double sparse_fraction = 0.3;
  double density_radius = 0.5;

  friend bool operator==(const MergerParams&, const MergerParams&) = default;
};

void validate(const MergerParams& params);

// w(i, j) = number of lane points (by provenance) shared by cluster i and the
// support of edge j.
WeightMatrix sharing_matrix(std::span<const LaneCluster> clusters, const LaneGraph& graph);

// Orders lane points into a polyline running from near axis_start towards
// axis_end.  Points are sorted by projection onto the axis; when that order
// jumps around (curved or U-shaped lanes) the longest geodesic path through the
// chain_radius neighbor graph is used instead.
std::vector<GlobalPoint> order_lane_points(std::span<const LanePoint> points, GlobalPoint axis_start,
                                           GlobalPoint axis_end, const MergerParams& params = {});

// Subset of `points` whose local evidence reaches sparse_fraction of the
// median.  `multiplicity` may be empty (every point counts once).
std::vector<LanePoint> drop_sparse_points(std::span<const LanePoint> points,
                                          std::span<const std::uint32_t> multiplicity,
                                          const MergerParams& params);

struct RoadLanes {
  std::string road_id;
  std::vector<Lane> lanes;  // ids unset until assembly
  RoadStats stats;
};

// Max-sharing assignment between clusters and edges; each kept pair becomes a
// lane built from the cluster points ordered along the edge axis.
RoadLanes merge_road(std::span<const LaneCluster> clusters, const LaneGraph& graph,
                     const std::string& road_id, const MergerParams& params = {});

// Clustering-only mapper output: every cluster becomes a lane ordered along its
// own farthest pair.
RoadLanes cluster_only_road(std::span<const LaneCluster> clusters, const std::string& road_id,
                            const MergerParams& params = {});

// Sorts roads by id and numbers lanes 0, 1, 2, ... in that order.
HDMap assemble_hd_map(std::vector<RoadLanes> per_road, const CoordinateFrame& frame = {});

}  // namespace lanemap

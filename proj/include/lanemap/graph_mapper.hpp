#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lanemap/dbscan.hpp"
#include "lanemap/lane_raster.hpp"

namespace lanemap {

// DB(P_i, 4, 5): min_pts 4, eps 5 m.
inline constexpr DbscanParams kGraphMapperDefaults{5.0, 4};
inline constexpr double kDefaultMergeRadius = 1.0;

// One lane-cluster endpoint that was folded into a vertex.
struct EndpointRef {
  Provenance source;
  GlobalPoint position;
};

struct Vertex {
  std::int64_t id = 0;
  GlobalPoint position;                  // centroid of member_endpoints
  std::vector<EndpointRef> member_endpoints;  // sorted by source key, unique
};

struct Edge {
  std::int64_t id = 0;
  std::pair<std::int64_t, std::int64_t> endpoints;  // vertex ids
  std::vector<LanePoint> support_points;
  LaneClass lane_class = LaneClass::kWhite;
};

struct LaneGraph {
  std::vector<Vertex> vertices;  // vertices[i].id == i
  std::vector<Edge> edges;       // edges[i].id == i
};

// Indices (i, j), i < j, of the farthest pair; ties go to the
// lexicographically smallest (i, j).  Exact: the diameter is searched among
// convex-hull vertices.  Requires >= 2 points.
std::pair<std::size_t, std::size_t> farthest_pair(std::span<const GlobalPoint> points);

struct ImageGraphResult {
  LaneGraph graph;
  std::size_t noise_points = 0;
  std::size_t skipped_clusters = 0;  // clusters collapsing to a single location
};

// Graph-based mapper for one lane image: DBSCAN, then one edge per cluster
// running between the cluster's farthest pair.
ImageGraphResult image_to_graph(std::span<const LanePoint> points,
                                const DbscanParams& params = kGraphMapperDefaults);

struct MergeResult {
  LaneGraph graph;
  std::size_t dropped_loops = 0;
  std::vector<LanePoint> dropped_support;  // support of dropped loop edges
  std::size_t merged_parallel = 0;
};

// Unions every pair of vertices within merge_radius (transitively), places
// merged vertices at member centroids and repeats until no two vertices are
// within merge_radius.  Edges are rewired; edges whose ends collapse are
// dropped; parallel edges (same vertex pair and class) are fused with the
// union of their supports.  Output ids are canonical.
MergeResult merge_graphs(std::span<const LaneGraph> graphs,
                         double merge_radius = kDefaultMergeRadius);

void validate(const LaneGraph& graph);

}  // namespace lanemap

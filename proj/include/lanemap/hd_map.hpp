#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanemap/geo.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {

// Channel order of lane images.
enum class LaneClass : std::uint8_t { kBrokenWhite = 0, kWhite = 1, kYellow = 2 };
inline constexpr int kNumLaneClasses = 3;

std::string_view to_string(LaneClass c);
LaneClass lane_class_from_string(std::string_view name);

using LaneId = std::uint64_t;

struct Lane {
  LaneId id = 0;
  std::vector<GlobalPoint> polyline;
  LaneClass lane_class = LaneClass::kWhite;
  std::string road_id;
  // Which cluster/edge pair produced the lane; absent for ground truth.
  std::optional<std::int64_t> cluster_id;
  std::optional<std::int64_t> edge_id;

  friend bool operator==(const Lane&, const Lane&) = default;
};

struct RoadStats {
  std::string road_id;
  std::int64_t clusters = 0;
  std::int64_t edges = 0;
  std::int64_t lanes = 0;
  std::int64_t unmatched_clusters = 0;
  std::int64_t unmatched_edges = 0;
  std::int64_t noise_points = 0;

  friend bool operator==(const RoadStats&, const RoadStats&) = default;
};

struct HDMap {
  std::vector<Lane> lanes;
  CoordinateFrame frame;
  std::vector<RoadStats> road_stats;

  friend bool operator==(const HDMap&, const HDMap&) = default;
};

// Lane invariants: >= 2 points, consecutive points distinct, finite.
void validate(const Lane& lane);
// Lane invariants for every lane plus unique ids.
void validate(const HDMap& map);

}  // namespace lanemap

#pragma once

#include <cstdint>

#include "lanemap/hd_map.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {

// Seeded generator of test worlds: smooth roads, each carrying parallel lane
// lines at a fixed spacing.  With fixtures enabled and at least two roads,
// road 0 is a U-turn and road 1 has a line that diverges from its neighbor
// (a Y split).
struct SyntheticWorldSpec {
  int num_roads = 20;
  int min_lines = 2;  // lane lines per road
  int max_lines = 4;
  double max_curvature = 0.005;  // 1/m; curvature is piecewise constant
  double lane_spacing = 3.5;     // meters
  double min_length = 80.0;
  double max_length = 140.0;
  double extent = 1500.0;  // side of the square the roads are scattered over
  bool fixtures = true;
  std::uint64_t seed = 1;

  friend bool operator==(const SyntheticWorldSpec&, const SyntheticWorldSpec&) = default;
};

void validate(const SyntheticWorldSpec& spec);

struct SyntheticWorld {
  RoadNetwork network;
  HDMap gt;
};

// Lines sit at offsets (k - (n - 1) / 2) * spacing, k = 0..n-1, measured to
// the left of the centerline.  The leftmost line is yellow, the rightmost
// white and the rest broken white.
SyntheticWorld generate_world(const SyntheticWorldSpec& spec);

std::string road_name(int index);

}  // namespace lanemap

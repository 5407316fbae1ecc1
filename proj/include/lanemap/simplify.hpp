#pragma once

#include <span>
#include <vector>

#include "lanemap/geo.hpp"

namespace lanemap {

// Douglas-Peucker.  Returns a subsequence of `polyline` that keeps both ends
// and lies within `tolerance` of every dropped point.
std::vector<GlobalPoint> douglas_peucker(std::span<const GlobalPoint> polyline, double tolerance);

}  // namespace lanemap

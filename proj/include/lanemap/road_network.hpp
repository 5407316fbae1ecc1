#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanemap/geo.hpp"

namespace lanemap {

// How input coordinates are interpreted.  Lon/lat input is projected with an
// equirectangular approximation about `origin_lon`/`origin_lat` (degrees).
struct CoordinateFrame {
  enum class Kind { kPlanar, kLonLat };
  Kind kind = Kind::kPlanar;
  double origin_lon = 0.0;
  double origin_lat = 0.0;

  friend bool operator==(const CoordinateFrame&, const CoordinateFrame&) = default;
};

inline constexpr double kEarthRadiusM = 6378137.0;

GlobalPoint project_lonlat(double lon, double lat, const CoordinateFrame& frame);
std::array<double, 2> unproject_lonlat(GlobalPoint pt, const CoordinateFrame& frame);

struct Road {
  std::string id;
  std::vector<GlobalPoint> polyline;
  std::optional<int> lane_count;
};

struct RoadNetwork {
  std::vector<Road> roads;
  CoordinateFrame frame;
  std::vector<std::string> warnings;
};

struct RoadPoint {
  std::string road_id;
  GlobalPoint position;
  double heading = 0.0;    // radians, counterclockwise from +x
  double arclength = 0.0;  // meters from the road start
};

// y' = a x'^2 + b x' + c in the heading-aligned frame of a road point.
struct ShapeCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double rms_residual = 0.0;
};

RoadNetwork parse_road_network(const std::filesystem::path& path,
                               const CoordinateFrame& frame = {});
RoadNetwork parse_road_network_text(const std::string& text, const CoordinateFrame& frame = {});

// Checks the Road invariants (>= 2 vertices, consecutive vertices distinct,
// finite coordinates).  Throws kInputDomain.
void validate(const Road& road);

inline constexpr double kDefaultRoadSpacing = 1.0;

std::vector<RoadPoint> interpolate_road(const Road& road, double spacing = kDefaultRoadSpacing);

// Road points of the same road that fall inside the footprint of `tile`.
std::vector<RoadPoint> fit_window(std::span<const RoadPoint> road_points, const TileSpec& tile);

ShapeCoeffs fit_road_shape(const RoadPoint& rp, std::span<const RoadPoint> window);

}  // namespace lanemap

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace lanemap {

// Meters in the dataset's local planar frame (x east, y north).
struct GlobalPoint {
  double x = 0.0;
  double y = 0.0;

  friend constexpr GlobalPoint operator+(GlobalPoint a, GlobalPoint b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr GlobalPoint operator-(GlobalPoint a, GlobalPoint b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr GlobalPoint operator*(double s, GlobalPoint a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(GlobalPoint a, GlobalPoint b) = default;
};

inline double dot(GlobalPoint a, GlobalPoint b) { return a.x * b.x + a.y * b.y; }
inline double cross(GlobalPoint a, GlobalPoint b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(GlobalPoint a) { return a.x * a.x + a.y * a.y; }
inline double norm(GlobalPoint a) { return std::hypot(a.x, a.y); }
inline double distance(GlobalPoint a, GlobalPoint b) { return norm(a - b); }
inline double squared_distance(GlobalPoint a, GlobalPoint b) { return squared_norm(a - b); }

// Counterclockwise rotation of v by `angle` radians.
inline GlobalPoint rotate(GlobalPoint v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double point_segment_distance(GlobalPoint p, GlobalPoint a, GlobalPoint b);
double point_polyline_distance(GlobalPoint p, std::span<const GlobalPoint> polyline);
double polyline_length(std::span<const GlobalPoint> polyline);

// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

struct PixelCoord {
  std::int32_t u = 0;  // column
  std::int32_t v = 0;  // row
  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
};

inline constexpr double kDefaultPixelSize = 0.25;  // m/px
inline constexpr std::int32_t kDefaultTileSize = 256;  // px

// A georeferenced raster patch centered on a road point.  Image +u runs along
// R(heading)·(1, 0) and image "up" (-v) along R(heading)·(0, 1).
struct TileSpec {
  GlobalPoint center;
  double heading = 0.0;
  double pixel_size = kDefaultPixelSize;
  std::int32_t width = kDefaultTileSize;
  std::int32_t height = kDefaultTileSize;

  double extent_x() const { return width * pixel_size; }
  double extent_y() const { return height * pixel_size; }
  bool in_bounds(PixelCoord pix) const {
    return pix.u >= 0 && pix.u < width && pix.v >= 0 && pix.v < height;
  }
  // Four footprint corners (global frame), counterclockwise.
  std::array<GlobalPoint, 4> corners() const;
  // True when `pt` falls inside the square footprint (closed).
  bool covers(GlobalPoint pt) const;

  bool operator==(const TileSpec&) const = default;
};

void validate(const TileSpec& tile);

// Continuous pixel-frame coordinates (u, v) of a global point; no rounding.
std::array<double, 2> global_to_pixel_continuous(GlobalPoint pt, const TileSpec& tile);

GlobalPoint pixel_to_global(PixelCoord pix, const TileSpec& tile);

// Nearest pixel whose center maps closest to `pt`.  Throws kOutOfTile when
// that pixel is outside the raster.
PixelCoord global_to_pixel(GlobalPoint pt, const TileSpec& tile);

struct RoadPoint;
TileSpec tile_for_road_point(const RoadPoint& rp, double pixel_size = kDefaultPixelSize,
                             std::int32_t width = kDefaultTileSize,
                             std::int32_t height = kDefaultTileSize);

}  // namespace lanemap

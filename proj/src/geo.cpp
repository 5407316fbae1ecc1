#include "lanemap/geo.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "lanemap/error.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInputDomain: return "input-domain";
    case ErrorKind::kOutOfTile: return "out-of-tile";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDegenerateWindow: return "degenerate-window";
    case ErrorKind::kDegenerateFit: return "degenerate-fit";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

double point_segment_distance(GlobalPoint p, GlobalPoint a, GlobalPoint b) {
  const GlobalPoint ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double point_polyline_distance(GlobalPoint p, std::span<const GlobalPoint> polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return distance(p, polyline.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
  }
  return best;
}

double polyline_length(std::span<const GlobalPoint> polyline) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    total += distance(polyline[i], polyline[i + 1]);
  }
  return total;
}

double normalize_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

void validate(const TileSpec& tile) {
  if (!(tile.pixel_size > 0.0) || !std::isfinite(tile.pixel_size)) {
    throw Error(ErrorKind::kInputDomain, "tile pixel_size must be > 0");
  }
  if (tile.width <= 0 || tile.height <= 0) {
    throw Error(ErrorKind::kInputDomain, "tile dimensions must be positive");
  }
  if (!std::isfinite(tile.center.x) || !std::isfinite(tile.center.y) ||
      !std::isfinite(tile.heading)) {
    throw Error(ErrorKind::kInputDomain, "tile center/heading must be finite");
  }
}

std::array<GlobalPoint, 4> TileSpec::corners() const {
  const double hx = 0.5 * extent_x();
  const double hy = 0.5 * extent_y();
  return {center + rotate({-hx, -hy}, heading), center + rotate({hx, -hy}, heading),
          center + rotate({hx, hy}, heading), center + rotate({-hx, hy}, heading)};
}

bool TileSpec::covers(GlobalPoint pt) const {
  const GlobalPoint local = rotate(pt - center, -heading);
  return std::abs(local.x) <= 0.5 * extent_x() && std::abs(local.y) <= 0.5 * extent_y();
}

// The image-to-global mapping is a proper rotation by the tile heading:
//   g = c + p * R(heading) * (u - w/2, -(v - h/2)).
GlobalPoint pixel_to_global(PixelCoord pix, const TileSpec& tile) {
  if (!tile.in_bounds(pix)) {
    throw Error(ErrorKind::kInputDomain, "pixel (" + std::to_string(pix.u) + ", " +
                                             std::to_string(pix.v) + ") outside tile");
  }
  const double du = tile.pixel_size * (pix.u - 0.5 * tile.width);
  const double dv = -tile.pixel_size * (pix.v - 0.5 * tile.height);
  return tile.center + rotate({du, dv}, tile.heading);
}

std::array<double, 2> global_to_pixel_continuous(GlobalPoint pt, const TileSpec& tile) {
  const GlobalPoint local = rotate(pt - tile.center, -tile.heading);
  return {local.x / tile.pixel_size + 0.5 * tile.width,
          0.5 * tile.height - local.y / tile.pixel_size};
}

PixelCoord global_to_pixel(GlobalPoint pt, const TileSpec& tile) {
  const auto [u, v] = global_to_pixel_continuous(pt, tile);
  const double ru = std::floor(u + 0.5);
  const double rv = std::floor(v + 0.5);
  if (!(ru >= 0.0 && ru < tile.width && rv >= 0.0 && rv < tile.height)) {
    throw Error(ErrorKind::kOutOfTile, "point (" + std::to_string(pt.x) + ", " +
                                           std::to_string(pt.y) + ") outside tile footprint");
  }
  return {static_cast<std::int32_t>(ru), static_cast<std::int32_t>(rv)};
}

TileSpec tile_for_road_point(const RoadPoint& rp, double pixel_size, std::int32_t width,
                             std::int32_t height) {
  TileSpec tile;
  tile.center = rp.position;
  tile.heading = rp.heading;
  tile.pixel_size = pixel_size;
  tile.width = width;
  tile.height = height;
  validate(tile);
  return tile;
}

}  // namespace lanemap

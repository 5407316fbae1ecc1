#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lanemap/geo.hpp"
#include "lanemap/hd_map.hpp"

namespace lanemap {

// Three intensity planes in [0, 1], one per LaneClass, row-major.
class LaneImage {
 public:
  LaneImage() = default;
  explicit LaneImage(const TileSpec& tile);

  const TileSpec& tile() const { return tile_; }
  std::int32_t width() const { return tile_.width; }
  std::int32_t height() const { return tile_.height; }

  float at(int channel, std::int32_t u, std::int32_t v) const {
    return data_[index(channel, u, v)];
  }
  float& at(int channel, std::int32_t u, std::int32_t v) { return data_[index(channel, u, v)]; }

  std::span<const float> plane(int channel) const;
  std::span<float> plane(int channel);

  // Pixels whose strongest channel reaches `threshold`.
  std::size_t lit_count(double threshold = 0.5) const;

  friend bool operator==(const LaneImage&, const LaneImage&) = default;

 private:
  std::size_t index(int channel, std::int32_t u, std::int32_t v) const {
    const auto plane_size = static_cast<std::size_t>(tile_.width) * tile_.height;
    return channel * plane_size + static_cast<std::size_t>(v) * tile_.width + u;
  }

  TileSpec tile_;
  std::vector<float> data_;
};

// Identifies where a lane point came from.  Unique per (tile, pixel); a pixel
// carries at most one class.
struct Provenance {
  std::uint32_t tile = 0;
  PixelCoord pixel;

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(tile) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(pixel.u)) << 16) |
           static_cast<std::uint16_t>(pixel.v);
  }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LanePoint {
  GlobalPoint position;
  LaneClass lane_class = LaneClass::kWhite;
  Provenance source;
  std::uint32_t road = 0;  // index of the road the source tile belongs to
};

struct LanePixel {
  PixelCoord pixel;
  LaneClass lane_class;
};

inline constexpr double kDefaultLaneThreshold = 0.5;

// Strongest channel per pixel (ties to the lowest channel index), reported when
// it reaches `threshold`.  Row-major order.
std::vector<LanePixel> extract_lane_pixels(const LaneImage& img,
                                           double threshold = kDefaultLaneThreshold);

std::optional<LaneClass> pixel_class(const LaneImage& img, std::int32_t u, std::int32_t v,
                                     double threshold = kDefaultLaneThreshold);

std::vector<LanePoint> lane_points_from_image(const LaneImage& img, std::uint32_t tile_index = 0,
                                              std::uint32_t road_index = 0,
                                              double threshold = kDefaultLaneThreshold);

// Rasterizes every lane of `gt` crossing the tile into its class channel.
// width_px == 1 lights the nearest pixel along the polyline; wider strokes
// add every pixel whose center lies within (width_px - 1) / 2 pixels.
LaneImage render_synthetic_tile(const HDMap& gt, const TileSpec& tile, int width_px = 1);
LaneImage render_synthetic_tile(std::span<const Lane> lanes, const TileSpec& tile,
                                int width_px = 1);

struct CorruptionParams {
  double dropout_fraction = 0.0;
  double jitter_sigma = 0.0;  // pixels
  int blur_radius = 0;        // pixels
  std::uint64_t seed = 0;

  bool is_identity() const {
    return dropout_fraction == 0.0 && jitter_sigma == 0.0 && blur_radius == 0;
  }
};

void validate(const CorruptionParams& params);

// Dropout, then jitter, then blur.  Dropout zeroes round(fraction * lit)
// lit pixels; jitter moves each lit pixel by rounded Gaussian offsets (kept
// per channel by max, clipped at the border); blur is a (2r+1)^2 box mean.
LaneImage corrupt(const LaneImage& img, const CorruptionParams& params);

// Square morphological dilation of every channel.
LaneImage dilate(const LaneImage& img, int radius_px);

}  // namespace lanemap

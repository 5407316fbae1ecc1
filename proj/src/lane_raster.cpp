#include "lanemap/lane_raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

// Sub-pixel step used to walk polyline segments when lighting nearest pixels.
constexpr double kSampleStepPx = 0.25;

using PixelPoint = std::array<double, 2>;

double segment_distance_px(double pu, double pv, PixelPoint a, PixelPoint b) {
  const double abu = b[0] - a[0];
  const double abv = b[1] - a[1];
  const double len2 = abu * abu + abv * abv;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((pu - a[0]) * abu + (pv - a[1]) * abv) / len2, 0.0, 1.0);
  const double du = pu - (a[0] + t * abu);
  const double dv = pv - (a[1] + t * abv);
  return std::sqrt(du * du + dv * dv);
}

void stroke_segment(LaneImage& img, int channel, PixelPoint a, PixelPoint b, int width_px) {
  const int w = img.width();
  const int h = img.height();
  const double reach = 0.5 * (width_px - 1);
  // Cull segments entirely outside the raster.
  if (std::max(a[0], b[0]) < -1.0 - reach || std::min(a[0], b[0]) > w + reach ||
      std::max(a[1], b[1]) < -1.0 - reach || std::min(a[1], b[1]) > h + reach) {
    return;
  }
  const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
  const auto steps = std::max<long>(1, static_cast<long>(std::ceil(len / kSampleStepPx)));
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps);
    const double u = std::floor(a[0] + t * (b[0] - a[0]) + 0.5);
    const double v = std::floor(a[1] + t * (b[1] - a[1]) + 0.5);
    if (u >= 0 && u < w && v >= 0 && v < h) {
      img.at(channel, static_cast<int>(u), static_cast<int>(v)) = 1.0f;
    }
  }
  if (width_px <= 1) return;
  const int u0 = std::max(0, static_cast<int>(std::floor(std::min(a[0], b[0]) - reach)));
  const int u1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a[0], b[0]) + reach)));
  const int v0 = std::max(0, static_cast<int>(std::floor(std::min(a[1], b[1]) - reach)));
  const int v1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a[1], b[1]) + reach)));
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      if (segment_distance_px(u, v, a, b) <= reach + 1e-9) img.at(channel, u, v) = 1.0f;
    }
  }
}

}  // namespace

LaneImage::LaneImage(const TileSpec& tile) : tile_(tile) {
  validate(tile);
  data_.assign(static_cast<std::size_t>(kNumLaneClasses) * tile.width * tile.height, 0.0f);
}

std::span<const float> LaneImage::plane(int channel) const {
  const auto n = static_cast<std::size_t>(tile_.width) * tile_.height;
  return std::span<const float>(data_).subspan(channel * n, n);
}

std::span<float> LaneImage::plane(int channel) {
  const auto n = static_cast<std::size_t>(tile_.width) * tile_.height;
  return std::span<float>(data_).subspan(channel * n, n);
}

std::size_t LaneImage::lit_count(double threshold) const {
  std::size_t count = 0;
  for (std::int32_t v = 0; v < height(); ++v) {
    for (std::int32_t u = 0; u < width(); ++u) {
      if (pixel_class(*this, u, v, threshold)) ++count;
    }
  }
  return count;
}

std::optional<LaneClass> pixel_class(const LaneImage& img, std::int32_t u, std::int32_t v,
                                     double threshold) {
  int best = 0;
  float best_value = img.at(0, u, v);
  for (int c = 1; c < kNumLaneClasses; ++c) {
    const float value = img.at(c, u, v);
    if (value > best_value) {
      best = c;
      best_value = value;
    }
  }
  if (best_value >= threshold) return static_cast<LaneClass>(best);
  return std::nullopt;
}

std::vector<LanePixel> extract_lane_pixels(const LaneImage& img, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::kInputDomain, "lane threshold must lie in (0, 1)");
  }
  std::vector<LanePixel> out;
  for (std::int32_t v = 0; v < img.height(); ++v) {
    for (std::int32_t u = 0; u < img.width(); ++u) {
      if (const auto cls = pixel_class(img, u, v, threshold)) out.push_back({{u, v}, *cls});
    }
  }
  return out;
}

std::vector<LanePoint> lane_points_from_image(const LaneImage& img, std::uint32_t tile_index,
                                              std::uint32_t road_index, double threshold) {
  const auto pixels = extract_lane_pixels(img, threshold);
  std::vector<LanePoint> out;
  out.reserve(pixels.size());
  for (const auto& px : pixels) {
    LanePoint lp;
    lp.position = pixel_to_global(px.pixel, img.tile());
    lp.lane_class = px.lane_class;
    lp.source = {tile_index, px.pixel};
    lp.road = road_index;
    out.push_back(lp);
  }
  return out;
}

LaneImage render_synthetic_tile(const HDMap& gt, const TileSpec& tile, int width_px) {
  return render_synthetic_tile(std::span<const Lane>(gt.lanes), tile, width_px);
}

LaneImage render_synthetic_tile(std::span<const Lane> lanes, const TileSpec& tile, int width_px) {
  if (width_px < 1) throw Error(ErrorKind::kInputDomain, "stroke width must be >= 1 pixel");
  LaneImage img(tile);
  const double half_diag = 0.5 * std::hypot(tile.extent_x(), tile.extent_y()) +
                           width_px * tile.pixel_size;
  for (const auto& lane : lanes) {
    if (lane.polyline.empty()) continue;
    double min_x = lane.polyline.front().x, max_x = min_x;
    double min_y = lane.polyline.front().y, max_y = min_y;
    for (const auto& p : lane.polyline) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    if (max_x < tile.center.x - half_diag || min_x > tile.center.x + half_diag ||
        max_y < tile.center.y - half_diag || min_y > tile.center.y + half_diag) {
      continue;
    }
    const int channel = static_cast<int>(lane.lane_class);
    PixelPoint prev = global_to_pixel_continuous(lane.polyline.front(), tile);
    if (lane.polyline.size() == 1) stroke_segment(img, channel, prev, prev, width_px);
    for (std::size_t i = 1; i < lane.polyline.size(); ++i) {
      const PixelPoint cur = global_to_pixel_continuous(lane.polyline[i], tile);
      stroke_segment(img, channel, prev, cur, width_px);
      prev = cur;
    }
  }
  return img;
}

void validate(const CorruptionParams& params) {
  if (!(params.dropout_fraction >= 0.0 && params.dropout_fraction <= 1.0)) {
    throw Error(ErrorKind::kInputDomain, "dropout_fraction must lie in [0, 1]");
  }
  if (!(params.jitter_sigma >= 0.0) || !std::isfinite(params.jitter_sigma)) {
    throw Error(ErrorKind::kInputDomain, "jitter_sigma must be >= 0");
  }
  if (params.blur_radius < 0) throw Error(ErrorKind::kInputDomain, "blur_radius must be >= 0");
}

LaneImage corrupt(const LaneImage& img, const CorruptionParams& params) {
  validate(params);
  LaneImage out = img;
  if (params.is_identity()) return out;

  std::mt19937_64 rng(params.seed);
  const int w = img.width();
  const int h = img.height();

  std::vector<std::int32_t> lit;
  for (std::int32_t v = 0; v < h; ++v) {
    for (std::int32_t u = 0; u < w; ++u) {
      if (pixel_class(out, u, v)) lit.push_back(v * w + u);
    }
  }

  if (params.dropout_fraction > 0.0) {
    const auto drop = static_cast<std::size_t>(
        std::llround(params.dropout_fraction * static_cast<double>(lit.size())));
    std::shuffle(lit.begin(), lit.end(), rng);
    for (std::size_t i = 0; i < drop; ++i) {
      for (int c = 0; c < kNumLaneClasses; ++c) out.at(c, lit[i] % w, lit[i] / w) = 0.0f;
    }
    lit.erase(lit.begin(), lit.begin() + static_cast<std::ptrdiff_t>(drop));
    std::sort(lit.begin(), lit.end());
  }

  if (params.jitter_sigma > 0.0) {
    std::normal_distribution<double> offset(0.0, params.jitter_sigma);
    LaneImage moved = out;
    for (const auto idx : lit) {
      for (int c = 0; c < kNumLaneClasses; ++c) moved.at(c, idx % w, idx / w) = 0.0f;
    }
    for (const auto idx : lit) {
      const int u = idx % w;
      const int v = idx / w;
      const int nu = std::clamp(u + static_cast<int>(std::lround(offset(rng))), 0, w - 1);
      const int nv = std::clamp(v + static_cast<int>(std::lround(offset(rng))), 0, h - 1);
      for (int c = 0; c < kNumLaneClasses; ++c) {
        moved.at(c, nu, nv) = std::max(moved.at(c, nu, nv), out.at(c, u, v));
      }
    }
    out = std::move(moved);
  }

  if (params.blur_radius > 0) {
    const int r = params.blur_radius;
    LaneImage blurred(img.tile());
    for (int c = 0; c < kNumLaneClasses; ++c) {
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          double sum = 0.0;
          int count = 0;
          for (int dv = -r; dv <= r; ++dv) {
            for (int du = -r; du <= r; ++du) {
              const int su = u + du;
              const int sv = v + dv;
              if (su < 0 || su >= w || sv < 0 || sv >= h) continue;
              sum += out.at(c, su, sv);
              ++count;
            }
          }
          blurred.at(c, u, v) = static_cast<float>(sum / count);
        }
      }
    }
    out = std::move(blurred);
  }
  return out;
}

LaneImage dilate(const LaneImage& img, int radius_px) {
  if (radius_px < 0) throw Error(ErrorKind::kInputDomain, "dilation radius must be >= 0");
  LaneImage out = img;
  const int w = img.width();
  const int h = img.height();
  for (int c = 0; c < kNumLaneClasses; ++c) {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        float best = 0.0f;
        for (int dv = -radius_px; dv <= radius_px; ++dv) {
          for (int du = -radius_px; du <= radius_px; ++du) {
            const int su = u + du;
            const int sv = v + dv;
            if (su < 0 || su >= w || sv < 0 || sv >= h) continue;
            best = std::max(best, img.at(c, su, sv));
          }
        }
        out.at(c, u, v) = best;
      }
    }
  }
  return out;
}

}  // namespace lanemap

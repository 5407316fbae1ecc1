#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanemap/dbscan.hpp"
#include "lanemap/hd_map.hpp"
#include "lanemap/lane_raster.hpp"

namespace lanemap {

inline constexpr double kDefaultMatchCutoff = 10.0;  // meters
inline constexpr std::array<double, 3> kDefaultThresholds{0.25, 1.0, 1.5};

// Orientation-invariant mean endpoint distance.
double lane_pair_distance(const Lane& a, const Lane& b);

struct MatchPair {
  LaneId constructed = 0;
  LaneId gt = 0;
  double distance = 0.0;
};

struct Matching {
  std::vector<MatchPair> pairs;  // ascending constructed id
  std::vector<LaneId> unmatched_constructed;
  std::vector<LaneId> unmatched_gt;
};

// Min-cost assignment on the all-pairs lane distance; pairs farther than
// `cutoff` are demoted to unmatched.
Matching match_maps(const HDMap& constructed, const HDMap& gt, double cutoff = kDefaultMatchCutoff);

double map_coverage(const Matching& m, std::size_t gt_count);
// Pairs strictly closer than theta, over the gt lane count.
double map_accuracy(const Matching& m, double theta, std::size_t gt_count);
double mean_vertex_distance(const Matching& m);

// Binarized (argmax + threshold) per-class pixel counts, summable over tiles.
struct RasterCounts {
  std::array<std::uint64_t, kNumLaneClasses> both{};       // lit in pred and gt
  std::array<std::uint64_t, kNumLaneClasses> pred_only{};
  std::array<std::uint64_t, kNumLaneClasses> gt_only{};
  std::uint64_t pixels = 0;
  std::uint64_t gt_lit = 0;  // pixels lit in any gt class

  RasterCounts& operator+=(const RasterCounts& o);
};

RasterCounts raster_counts(const LaneImage& pred, const LaneImage& gt,
                           double threshold = kDefaultLaneThreshold);

struct PixelAccuracy {
  std::array<double, kNumLaneClasses> per_class{};  // percent
  double total = 0.0;                               // mean over classes
};

struct MiouResult {
  std::array<std::optional<double>, kNumLaneClasses> per_class;  // absent in both -> nullopt
  std::optional<double> mean;
};

PixelAccuracy pixel_accuracy(const RasterCounts& c);
PixelAccuracy pixel_accuracy(const LaneImage& pred, const LaneImage& gt);
MiouResult miou(const RasterCounts& c);
MiouResult miou(const LaneImage& pred, const LaneImage& gt);
// Percentage of gt pixels that are lane pixels.
double lane_ratio(const RasterCounts& c);

inline constexpr DbscanParams kLaneCountParams{3.0, 4};  // pixel units

// |clusters of pred's lane pixels (pixel space) - gt_lane_count|.
std::size_t lane_count_discrepancy(const LaneImage& pred, std::size_t gt_lane_count,
                                   const DbscanParams& params = kLaneCountParams);

struct MetricsReport {
  std::size_t gt_lanes = 0;
  std::size_t constructed_lanes = 0;
  std::size_t matched = 0;
  std::optional<double> coverage_pct;
  std::vector<std::pair<double, std::optional<double>>> accuracy_pct;  // (theta, percent)
  std::optional<double> mean_vertex_distance_m;

  // Raster section; present when lane images were compared with gt renders.
  std::optional<PixelAccuracy> pixel_accuracy;
  std::optional<MiouResult> miou;
  std::optional<double> lane_ratio_pct;
  std::optional<double> mean_lane_count_discrepancy;
  std::size_t raster_tiles = 0;
};

MetricsReport evaluate_maps(const HDMap& constructed, const HDMap& gt,
                            const std::vector<double>& thresholds = {kDefaultThresholds.begin(),
                                                                     kDefaultThresholds.end()},
                            double cutoff = kDefaultMatchCutoff);

// Flat "key = value" lines; keys are documented in the README.
std::string to_text(const MetricsReport& r);
nlohmann::ordered_json to_json(const MetricsReport& r);

}  // namespace lanemap

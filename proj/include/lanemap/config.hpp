#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanemap/cluster_mapper.hpp"
#include "lanemap/evaluation.hpp"
#include "lanemap/graph_mapper.hpp"
#include "lanemap/lane_raster.hpp"
#include "lanemap/map_merger.hpp"
#include "lanemap/road_network.hpp"
#include "lanemap/world.hpp"

namespace lanemap {

enum class MapperMode { kFused, kClusterOnly };

struct PipelineConfig {
  // Inputs.  Without a roads file a synthetic world is generated from `world`
  // and serves as ground truth.  With a roads file, lane images come from
  // `images_dir` (manifest.txt + PNGs) or are rendered from `gt_path`.
  std::string roads_path;
  std::string gt_path;
  std::string images_dir;
  CoordinateFrame frame;
  SyntheticWorldSpec world;
  std::string output_dir = "lanemap_out";

  double pixel_size = kDefaultPixelSize;
  std::int32_t tile_width = kDefaultTileSize;
  std::int32_t tile_height = kDefaultTileSize;
  double road_spacing = kDefaultRoadSpacing;

  int stroke_width = 1;
  double lane_threshold = kDefaultLaneThreshold;
  CorruptionParams corruption;  // seed is derived per tile from `seed`

  DbscanParams cluster_dbscan = kClusterMapperDefaults;
  double dedup_cell = kDefaultDedupCell;
  DbscanParams graph_dbscan = kGraphMapperDefaults;
  double merge_radius = kDefaultMergeRadius;
  MapperMode mapper = MapperMode::kFused;
  MergerParams merger;

  bool evaluate = true;
  std::vector<double> thresholds{kDefaultThresholds.begin(), kDefaultThresholds.end()};
  double match_cutoff = kDefaultMatchCutoff;
  bool raster_metrics = true;
  DbscanParams lane_count_dbscan = kLaneCountParams;

  std::uint64_t seed = 0;
  int threads = 1;
};

// Throws kConfig on the first invalid field.
void validate(const PipelineConfig& cfg);

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
// Starts from `base` and overrides every key present in `j`; unknown keys are
// rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

}  // namespace lanemap

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanemap/config.hpp"
#include "lanemap/evaluation.hpp"
#include "lanemap/hd_map.hpp"
#include "lanemap/raster_io.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {

struct PipelineInputs {
  RoadNetwork network;
  std::optional<HDMap> gt;
};

// Reads the road file (and gt map), or generates the synthetic world.
PipelineInputs load_inputs(const PipelineConfig& cfg);

// One tile per interpolated road point.
std::vector<TileSpec> road_tiles(const Road& road, const PipelineConfig& cfg);

// Per-tile corruption seed derived from the run seed.
std::uint64_t tile_seed(std::uint64_t seed, std::size_t road_index, std::size_t tile_index);

// Renders (and corrupts) every tile of every road, writing PNGs and
// manifest.txt into `dir`.  Returns the manifest entries.
std::vector<ManifestEntry> write_lane_images(const PipelineConfig& cfg, const PipelineInputs& inputs,
                                             const std::filesystem::path& dir);

struct PipelineCounts {
  std::size_t roads = 0;
  std::size_t tiles = 0;  // tiles processed
  std::size_t lane_points = 0;
  std::size_t soft_errors = 0;  // tiles skipped (unreadable images)
  std::size_t graph_edges_before_merge = 0;
  std::size_t dropped_loops = 0;
  std::size_t merged_parallel = 0;
};

struct PipelineResult {
  HDMap map;
  std::optional<MetricsReport> metrics;
  PipelineCounts counts;
  std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const PipelineConfig& cfg);
PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs);

nlohmann::ordered_json report_json(const PipelineConfig& cfg, const PipelineResult& result);
std::string report_text(const PipelineConfig& cfg, const PipelineResult& result);

// Writes map.geojson, report.txt and report.json into cfg.output_dir.
void write_outputs(const PipelineConfig& cfg, const PipelineResult& result);

}  // namespace lanemap

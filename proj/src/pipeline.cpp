#include "lanemap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "lanemap/cluster_mapper.hpp"
#include "lanemap/error.hpp"
#include "lanemap/geojson_io.hpp"
#include "lanemap/graph_mapper.hpp"
#include "lanemap/lane_raster.hpp"
#include "lanemap/map_merger.hpp"
#include "lanemap/world.hpp"

namespace lanemap {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Where a road's lane images come from.
struct ImageSource {
  const PipelineConfig* cfg = nullptr;
  const std::vector<Lane>* render_lanes = nullptr;  // synthetic rendering
  std::filesystem::path images_dir;                 // PNG import
  std::map<std::string, std::vector<ManifestEntry>> manifest;
};

struct TileImages {
  LaneImage image;
  std::optional<LaneImage> clean;  // rendering before corruption
};

std::size_t lanes_in_tile(std::span<const Lane> lanes, const TileSpec& tile) {
  std::size_t n = 0;
  for (const auto& lane : lanes) {
    bool inside = false;
    for (std::size_t i = 0; i + 1 < lane.polyline.size() && !inside; ++i) {
      const GlobalPoint a = lane.polyline[i];
      const GlobalPoint d = lane.polyline[i + 1] - a;
      const int steps = std::max(1, static_cast<int>(std::ceil(norm(d) / tile.pixel_size)));
      for (int k = 0; k <= steps && !inside; ++k) inside = tile.covers(a + (static_cast<double>(k) / steps) * d);
    }
    if (inside) ++n;
  }
  return n;
}

struct RoadOutput {
  RoadLanes lanes;
  std::size_t tiles = 0;
  std::size_t lane_points = 0;
  std::size_t soft_errors = 0;
  std::size_t graph_edges = 0;
  std::size_t dropped_loops = 0;
  std::size_t merged_parallel = 0;
  RasterCounts raster;
  std::size_t raster_tiles = 0;
  double lane_count_discrepancy = 0.0;
  std::vector<std::string> warnings;
};

RoadOutput process_road(const PipelineConfig& cfg, const ImageSource& src, const Road& road,
                        std::size_t road_index, bool raster_metrics) {
  RoadOutput out;
  std::vector<TileSpec> tiles;
  std::vector<std::string> tile_ids;
  if (src.render_lanes) {
    try {
      tiles = road_tiles(road, cfg);
    } catch (const Error& e) {
      throw StageError("interpolate", road.id, e);
    }
    for (std::size_t k = 0; k < tiles.size(); ++k) tile_ids.push_back(make_tile_id(road.id, k));
  } else {
    const auto it = src.manifest.find(road.id);
    if (it != src.manifest.end()) {
      for (const auto& entry : it->second) {
        tiles.push_back(entry.tile);
        tile_ids.push_back(entry.tile_id);
      }
    }
  }

  std::vector<LanePoint> road_points;
  std::vector<LaneGraph> graphs;
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    LaneImage image;
    if (src.render_lanes) {
      LaneImage clean;
      try {
        clean = render_synthetic_tile(*src.render_lanes, tiles[k], cfg.stroke_width);
        CorruptionParams corruption = cfg.corruption;
        corruption.seed = tile_seed(cfg.seed, road_index, k);
        image = corrupt(clean, corruption);
      } catch (const Error& e) {
        throw StageError("render", tile_ids[k], e);
      }
      if (raster_metrics) {
        out.raster += raster_counts(image, clean, cfg.lane_threshold);
        const std::size_t expected = lanes_in_tile(*src.render_lanes, tiles[k]);
        out.lane_count_discrepancy +=
            static_cast<double>(lane_count_discrepancy(image, expected, cfg.lane_count_dbscan));
        ++out.raster_tiles;
      }
    } else {
      try {
        image = read_lane_png(src.images_dir / tile_png_name(tile_ids[k]), tiles[k]);
      } catch (const Error& e) {
        ++out.soft_errors;
        out.warnings.push_back("tile '" + tile_ids[k] + "' skipped: " + e.what());
        continue;
      }
    }
    ++out.tiles;
    std::vector<LanePoint> points;
    try {
      points = lane_points_from_image(image, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(road_index),
                                      cfg.lane_threshold);
    } catch (const Error& e) {
      throw StageError("extract", tile_ids[k], e);
    }
    out.lane_points += points.size();
    if (cfg.mapper == MapperMode::kFused) {
      try {
        auto g = image_to_graph(points, cfg.graph_dbscan);
        out.graph_edges += g.graph.edges.size();
        graphs.push_back(std::move(g.graph));
      } catch (const Error& e) {
        throw StageError("graph_mapper", tile_ids[k], e);
      }
    }
    road_points.insert(road_points.end(), points.begin(), points.end());
  }

  ClusterMapperResult clusters;
  try {
    clusters = cluster_road_lanes(road_points, cfg.cluster_dbscan, cfg.dedup_cell);
  } catch (const Error& e) {
    throw StageError("cluster_mapper", road.id, e);
  }
  try {
    if (cfg.mapper == MapperMode::kFused) {
      const MergeResult merged = merge_graphs(graphs, cfg.merge_radius);
      out.dropped_loops = merged.dropped_loops;
      out.merged_parallel = merged.merged_parallel;
      out.lanes = merge_road(clusters.clusters, merged.graph, road.id, cfg.merger);
    } else {
      out.lanes = cluster_only_road(clusters.clusters, road.id, cfg.merger);
    }
  } catch (const Error& e) {
    throw StageError("merge", road.id, e);
  }
  out.lanes.stats.noise_points = static_cast<std::int64_t>(clusters.noise_points);
  return out;
}

}  // namespace

std::uint64_t tile_seed(std::uint64_t seed, std::size_t road_index, std::size_t tile_index) {
  return splitmix64(splitmix64(seed) ^ ((static_cast<std::uint64_t>(road_index) << 32) | tile_index));
}

PipelineInputs load_inputs(const PipelineConfig& cfg) {
  PipelineInputs in;
  if (cfg.roads_path.empty()) {
    try {
      SyntheticWorld world = generate_world(cfg.world);
      in.network = std::move(world.network);
      in.gt = std::move(world.gt);
    } catch (const Error& e) {
      throw StageError("synth", "world", e);
    }
    return in;
  }
  try {
    in.network = parse_road_network(cfg.roads_path, cfg.frame);
  } catch (const Error& e) {
    throw StageError("ingest", cfg.roads_path, e);
  }
  if (!cfg.gt_path.empty()) {
    try {
      in.gt = import_geojson(cfg.gt_path);
    } catch (const Error& e) {
      throw StageError("ingest", cfg.gt_path, e);
    }
  }
  return in;
}

std::vector<TileSpec> road_tiles(const Road& road, const PipelineConfig& cfg) {
  std::vector<TileSpec> tiles;
  for (const auto& rp : interpolate_road(road, cfg.road_spacing)) {
    tiles.push_back(tile_for_road_point(rp, cfg.pixel_size, cfg.tile_width, cfg.tile_height));
  }
  return tiles;
}

std::vector<ManifestEntry> write_lane_images(const PipelineConfig& cfg, const PipelineInputs& inputs,
                                             const std::filesystem::path& dir) {
  validate(cfg);
  if (!inputs.gt) throw Error(ErrorKind::kConfig, "rendering lane images needs a ground-truth map");
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (std::size_t r = 0; r < inputs.network.roads.size(); ++r) {
    const Road& road = inputs.network.roads[r];
    const auto tiles = road_tiles(road, cfg);
    for (std::size_t k = 0; k < tiles.size(); ++k) {
      CorruptionParams corruption = cfg.corruption;
      corruption.seed = tile_seed(cfg.seed, r, k);
      const LaneImage img = corrupt(render_synthetic_tile(inputs.gt->lanes, tiles[k], cfg.stroke_width), corruption);
      const std::string id = make_tile_id(road.id, k);
      write_lane_png(dir / tile_png_name(id), img);
      entries.push_back({id, tiles[k]});
    }
  }
  write_manifest(dir / "manifest.txt", entries);
  return entries;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw StageError("config", "pipeline", e);
  }
  return run_pipeline(cfg, load_inputs(cfg));
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw StageError("config", "pipeline", e);
  }
  ImageSource src;
  src.cfg = &cfg;
  if (!cfg.images_dir.empty()) {
    src.images_dir = cfg.images_dir;
    std::vector<ManifestEntry> entries;
    try {
      entries = read_manifest(src.images_dir / "manifest.txt");
    } catch (const Error& e) {
      throw StageError("extract", cfg.images_dir, e);
    }
    for (auto& e : entries) src.manifest[road_id_of_tile(e.tile_id)].push_back(std::move(e));
  } else {
    if (!inputs.gt) throw StageError("extract", "pipeline", Error(ErrorKind::kConfig, "no lane image source"));
    src.render_lanes = &inputs.gt->lanes;
  }
  const bool raster_metrics = cfg.evaluate && cfg.raster_metrics && src.render_lanes != nullptr;

  const auto& roads = inputs.network.roads;
  std::vector<std::optional<RoadOutput>> slots(roads.size());
  std::vector<std::exception_ptr> errors(roads.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < roads.size(); r = next++) {
      try {
        slots[r] = process_road(cfg, src, roads[r], r, raster_metrics);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(cfg.threads, std::max<std::size_t>(1, roads.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PipelineResult result;
  result.warnings = inputs.network.warnings;
  result.counts.roads = roads.size();
  std::vector<RoadLanes> per_road;
  RasterCounts raster;
  std::size_t raster_tiles = 0;
  double discrepancy = 0.0;
  for (auto& slot : slots) {
    RoadOutput& o = *slot;
    result.counts.tiles += o.tiles;
    result.counts.lane_points += o.lane_points;
    result.counts.soft_errors += o.soft_errors;
    result.counts.graph_edges_before_merge += o.graph_edges;
    result.counts.dropped_loops += o.dropped_loops;
    result.counts.merged_parallel += o.merged_parallel;
    raster += o.raster;
    raster_tiles += o.raster_tiles;
    discrepancy += o.lane_count_discrepancy;
    result.warnings.insert(result.warnings.end(), o.warnings.begin(), o.warnings.end());
    per_road.push_back(std::move(o.lanes));
  }
  result.map = assemble_hd_map(std::move(per_road), inputs.network.frame);

  if (cfg.evaluate && inputs.gt) {
    try {
      MetricsReport m = evaluate_maps(result.map, *inputs.gt, cfg.thresholds, cfg.match_cutoff);
      if (raster_tiles > 0) {
        m.raster_tiles = raster_tiles;
        m.pixel_accuracy = pixel_accuracy(raster);
        m.miou = miou(raster);
        m.lane_ratio_pct = lane_ratio(raster);
        m.mean_lane_count_discrepancy = discrepancy / static_cast<double>(raster_tiles);
      }
      result.metrics = std::move(m);
    } catch (const Error& e) {
      throw StageError("evaluate", "map", e);
    }
  }
  return result;
}

nlohmann::ordered_json report_json(const PipelineConfig& cfg, const PipelineResult& result) {
  nlohmann::ordered_json j;
  j["config"] = to_json(cfg);
  const auto& c = result.counts;
  j["counts"] = {{"roads", c.roads},
                 {"tiles", c.tiles},
                 {"lane_points", c.lane_points},
                 {"soft_errors", c.soft_errors},
                 {"graph_edges_before_merge", c.graph_edges_before_merge},
                 {"dropped_loops", c.dropped_loops},
                 {"merged_parallel", c.merged_parallel},
                 {"lanes", result.map.lanes.size()}};
  j["metrics"] = result.metrics ? to_json(*result.metrics) : nlohmann::ordered_json(nullptr);
  j["warnings"] = result.warnings;
  return j;
}

std::string report_text(const PipelineConfig& cfg, const PipelineResult& result) {
  std::ostringstream os;
  // Flatten the config echo into dotted keys.
  const auto cj = to_json(cfg);
  auto flatten = [&](auto&& self, const std::string& prefix, const nlohmann::ordered_json& node) -> void {
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) self(self, prefix.empty() ? k : prefix + "." + k, v);
    } else {
      os << "config." << prefix << " = " << (node.is_string() ? node.get<std::string>() : node.dump()) << '\n';
    }
  };
  flatten(flatten, "", cj);
  const auto& c = result.counts;
  os << "roads = " << c.roads << '\n'
     << "tiles = " << c.tiles << '\n'
     << "lane_points = " << c.lane_points << '\n'
     << "soft_errors = " << c.soft_errors << '\n'
     << "graph_edges_before_merge = " << c.graph_edges_before_merge << '\n'
     << "dropped_loops = " << c.dropped_loops << '\n'
     << "merged_parallel = " << c.merged_parallel << '\n'
     << "lanes = " << result.map.lanes.size() << '\n';
  if (result.metrics) os << to_text(*result.metrics);
  return os.str();
}

void write_outputs(const PipelineConfig& cfg, const PipelineResult& result) {
  const std::filesystem::path dir = cfg.output_dir;
  try {
    export_geojson(result.map, dir / "map.geojson");
    write_text_file(dir / "report.txt", report_text(cfg, result));
    write_text_file(dir / "report.json", report_json(cfg, result).dump(1) + "\n");
  } catch (const Error& e) {
    throw StageError("persist", dir.string(), e);
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError("persist", dir.string(), Error(ErrorKind::kIo, e.what()));
  }
}

}  // namespace lanemap

// lanemap command-line front end.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lanemap/config.hpp"
#include "lanemap/error.hpp"
#include "lanemap/evaluation.hpp"
#include "lanemap/geojson_io.hpp"
#include "lanemap/pipeline.hpp"
#include "lanemap/raster_io.hpp"
#include "lanemap/world.hpp"

namespace {

using lanemap::PipelineConfig;

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  std::optional<std::string> roads, gt, images, out;
  bool lonlat = false;
  std::optional<double> origin_lon, origin_lat;
  std::optional<int> num_roads;
  std::optional<std::uint64_t> world_seed;
  std::optional<double> pixel_size, spacing;
  std::optional<int> tile_size, stroke_width;
  std::optional<double> dropout, jitter;
  std::optional<int> blur;
  std::optional<double> cluster_eps, graph_eps, merge_radius;
  std::optional<std::size_t> cluster_min_pts, graph_min_pts;
  std::optional<std::string> mapper;
  bool no_eval = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_config_flags(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--roads", o.roads, "road network GeoJSON");
  app->add_option("--gt", o.gt, "ground-truth map GeoJSON");
  app->add_option("--images", o.images, "lane image directory (manifest.txt + PNGs)");
  app->add_option("-o,--out", o.out, "output directory");
  app->add_flag("--lonlat", o.lonlat, "road coordinates are lon/lat");
  app->add_option("--origin-lon", o.origin_lon, "projection origin longitude");
  app->add_option("--origin-lat", o.origin_lat, "projection origin latitude");
  app->add_option("--num-roads", o.num_roads, "synthetic world: number of roads");
  app->add_option("--world-seed", o.world_seed, "synthetic world seed");
  app->add_option("--pixel-size", o.pixel_size, "meters per pixel");
  app->add_option("--tile-size", o.tile_size, "tile width and height in pixels");
  app->add_option("--spacing", o.spacing, "road interpolation spacing (m)");
  app->add_option("--stroke-width", o.stroke_width, "rendered lane width (px)");
  app->add_option("--dropout", o.dropout, "corruption: dropout fraction");
  app->add_option("--jitter", o.jitter, "corruption: jitter sigma (px)");
  app->add_option("--blur", o.blur, "corruption: box blur radius (px)");
  app->add_option("--cluster-eps", o.cluster_eps, "cluster mapper DBSCAN eps (m)");
  app->add_option("--cluster-min-pts", o.cluster_min_pts, "cluster mapper DBSCAN min_pts");
  app->add_option("--graph-eps", o.graph_eps, "graph mapper DBSCAN eps (m)");
  app->add_option("--graph-min-pts", o.graph_min_pts, "graph mapper DBSCAN min_pts");
  app->add_option("--merge-radius", o.merge_radius, "vertex merge radius (m)");
  app->add_option("--mapper", o.mapper, "fused or cluster_only")->check(CLI::IsMember({"fused", "cluster_only"}));
  app->add_flag("--no-eval", o.no_eval, "skip evaluation");
  app->add_option("--seed", o.seed, "corruption seed");
  app->add_option("--threads", o.threads, "roads processed in parallel");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = lanemap::load_config(o.config_path);
  if (o.roads) cfg.roads_path = *o.roads;
  if (o.gt) cfg.gt_path = *o.gt;
  if (o.images) cfg.images_dir = *o.images;
  if (o.out) cfg.output_dir = *o.out;
  if (o.lonlat) cfg.frame.kind = lanemap::CoordinateFrame::Kind::kLonLat;
  if (o.origin_lon) cfg.frame.origin_lon = *o.origin_lon;
  if (o.origin_lat) cfg.frame.origin_lat = *o.origin_lat;
  if (o.num_roads) cfg.world.num_roads = *o.num_roads;
  if (o.world_seed) cfg.world.seed = *o.world_seed;
  if (o.pixel_size) cfg.pixel_size = *o.pixel_size;
  if (o.tile_size) cfg.tile_width = cfg.tile_height = *o.tile_size;
  if (o.spacing) cfg.road_spacing = *o.spacing;
  if (o.stroke_width) cfg.stroke_width = *o.stroke_width;
  if (o.dropout) cfg.corruption.dropout_fraction = *o.dropout;
  if (o.jitter) cfg.corruption.jitter_sigma = *o.jitter;
  if (o.blur) cfg.corruption.blur_radius = *o.blur;
  if (o.cluster_eps) cfg.cluster_dbscan.eps = *o.cluster_eps;
  if (o.cluster_min_pts) cfg.cluster_dbscan.min_pts = *o.cluster_min_pts;
  if (o.graph_eps) cfg.graph_dbscan.eps = *o.graph_eps;
  if (o.graph_min_pts) cfg.graph_dbscan.min_pts = *o.graph_min_pts;
  if (o.merge_radius) cfg.merge_radius = *o.merge_radius;
  if (o.mapper) cfg.mapper = *o.mapper == "fused" ? lanemap::MapperMode::kFused : lanemap::MapperMode::kClusterOnly;
  if (o.no_eval) cfg.evaluate = false;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  lanemap::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-level HD map construction from road networks and lane images"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic world (roads.geojson, gt.geojson)");
  auto* ingest = app.add_subcommand("ingest", "parse a road network and summarize interpolation");
  auto* extract = app.add_subcommand("extract", "render lane images (PNGs + manifest.txt) for every tile");
  auto* map = app.add_subcommand("map", "build the HD map without evaluation");
  auto* run = app.add_subcommand("run", "full pipeline: map, evaluate, persist");
  for (auto* sub : {synth, ingest, extract, map, run}) add_config_flags(sub, o);

  std::string map_path, gt_path, export_path, eval_out;
  double origin_lon = 0.0, origin_lat = 0.0, cutoff = lanemap::kDefaultMatchCutoff;
  auto* eval = app.add_subcommand("eval", "compare a map with a ground-truth map");
  eval->add_option("--map", map_path, "constructed map GeoJSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt_path, "ground-truth map GeoJSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--cutoff", cutoff, "match cutoff (m)");
  eval->add_option("-o,--out", eval_out, "directory for metrics.txt / metrics.json");
  auto* exp = app.add_subcommand("export", "re-export a planar map as lon/lat GeoJSON");
  exp->add_option("--map", map_path, "planar map GeoJSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--origin-lon", origin_lon, "origin longitude")->required();
  exp->add_option("--origin-lat", origin_lat, "origin latitude")->required();
  exp->add_option("-o,--output", export_path, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      PipelineConfig cfg = resolve(o);
      const auto world = lanemap::generate_world(cfg.world);
      const std::filesystem::path dir = cfg.output_dir;
      lanemap::write_text_file(dir / "roads.geojson", lanemap::roads_to_geojson(world.network));
      lanemap::export_geojson(world.gt, dir / "gt.geojson");
      std::cout << "roads = " << world.network.roads.size() << "\ngt_lanes = " << world.gt.lanes.size() << '\n';
    } else if (ingest->parsed()) {
      PipelineConfig cfg = resolve(o);
      const auto inputs = lanemap::load_inputs(cfg);
      std::size_t points = 0;
      for (const auto& road : inputs.network.roads) {
        const auto rps = lanemap::interpolate_road(road, cfg.road_spacing);
        points += rps.size();
        std::cout << road.id << " vertices=" << road.polyline.size()
                  << " length_m=" << lanemap::format_double(lanemap::polyline_length(road.polyline))
                  << " road_points=" << rps.size() << '\n';
      }
      for (const auto& w : inputs.network.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "roads = " << inputs.network.roads.size() << "\nroad_points = " << points << '\n';
    } else if (extract->parsed()) {
      PipelineConfig cfg = resolve(o);
      const auto inputs = lanemap::load_inputs(cfg);
      const std::filesystem::path dir =
          cfg.images_dir.empty() ? std::filesystem::path(cfg.output_dir) / "images" : std::filesystem::path(cfg.images_dir);
      PipelineConfig render_cfg = cfg;
      render_cfg.images_dir.clear();
      if (render_cfg.roads_path.empty()) render_cfg.gt_path.clear();
      const auto entries = lanemap::write_lane_images(render_cfg, inputs, dir);
      std::cout << "tiles = " << entries.size() << "\nimages = " << dir.string() << '\n';
    } else if (map->parsed() || run->parsed()) {
      PipelineConfig cfg = resolve(o);
      if (map->parsed()) cfg.evaluate = false;
      const auto result = lanemap::run_pipeline(cfg);
      lanemap::write_outputs(cfg, result);
      std::cout << "lanes = " << result.map.lanes.size() << '\n';
      if (result.metrics) std::cout << lanemap::to_text(*result.metrics);
    } else if (eval->parsed()) {
      const auto constructed = lanemap::import_geojson(map_path);
      const auto gt = lanemap::import_geojson(gt_path);
      const auto report = lanemap::evaluate_maps(
          constructed, gt, {lanemap::kDefaultThresholds.begin(), lanemap::kDefaultThresholds.end()}, cutoff);
      std::cout << lanemap::to_text(report);
      if (!eval_out.empty()) {
        lanemap::write_text_file(std::filesystem::path(eval_out) / "metrics.txt", lanemap::to_text(report));
        lanemap::write_text_file(std::filesystem::path(eval_out) / "metrics.json",
                                 lanemap::to_json(report).dump(1) + "\n");
      }
    } else if (exp->parsed()) {
      auto m = lanemap::import_geojson(map_path);
      m.frame.kind = lanemap::CoordinateFrame::Kind::kLonLat;
      m.frame.origin_lon = origin_lon;
      m.frame.origin_lat = origin_lat;
      lanemap::export_geojson(m, export_path);
    }
  } catch (const lanemap::StageError& e) {
    std::cerr << "error [" << lanemap::to_string(e.kind()) << "] " << e.what() << '\n';
    return 2;
  } catch (const lanemap::Error& e) {
    std::cerr << "error [" << lanemap::to_string(e.kind()) << "] " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

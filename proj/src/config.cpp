#include "lanemap/config.hpp"

#include <cmath>
#include <set>

#include "lanemap/error.hpp"
#include "lanemap/geojson_io.hpp"

namespace lanemap {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, where + " must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::kConfig, "unknown config key " + where + "." + key);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, "config " + where + "." + key + ": " + e.what());
  }
}

ojson dbscan_json(const DbscanParams& p) { return {{"eps", p.eps}, {"min_pts", p.min_pts}}; }

void read_dbscan(const json& j, DbscanParams& p, const std::string& where) {
  read(j, "eps", p.eps, where);
  read(j, "min_pts", p.min_pts, where);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kConfig, what);
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  require(cfg.pixel_size > 0.0 && std::isfinite(cfg.pixel_size), "tile.pixel_size must be > 0");
  require(cfg.tile_width > 0 && cfg.tile_height > 0 && cfg.tile_width <= 65535 && cfg.tile_height <= 65535,
          "tile width/height must lie in [1, 65535]");
  require(cfg.road_spacing > 0.0 && std::isfinite(cfg.road_spacing), "tile.spacing must be > 0");
  require(cfg.stroke_width >= 1, "render.stroke_width must be >= 1");
  require(cfg.lane_threshold > 0.0 && cfg.lane_threshold < 1.0, "render.lane_threshold must lie in (0, 1)");
  require(cfg.dedup_cell > 0.0, "cluster_mapper.dedup_cell must be > 0");
  require(cfg.merge_radius >= 0.0, "graph_mapper.merge_radius must be >= 0");
  require(cfg.match_cutoff > 0.0, "evaluation.match_cutoff must be > 0");
  for (const double t : cfg.thresholds) require(t > 0.0, "evaluation thresholds must be > 0");
  require(cfg.threads >= 1, "threads must be >= 1");
  require(cfg.gt_path.empty() || !cfg.roads_path.empty(), "input.gt needs input.roads");
  require(cfg.roads_path.empty() || !cfg.images_dir.empty() || !cfg.gt_path.empty(),
          "input.roads needs input.images or input.gt to obtain lane images");
  try {
    validate(cfg.corruption);
    validate(cfg.cluster_dbscan);
    validate(cfg.graph_dbscan);
    validate(cfg.lane_count_dbscan);
    validate(cfg.merger);
    if (cfg.roads_path.empty()) validate(cfg.world);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
}

ojson to_json(const PipelineConfig& cfg) {
  ojson j;
  j["input"] = {{"roads", cfg.roads_path},
                {"gt", cfg.gt_path},
                {"images", cfg.images_dir},
                {"frame",
                 {{"kind", cfg.frame.kind == CoordinateFrame::Kind::kLonLat ? "lonlat" : "planar"},
                  {"origin_lon", cfg.frame.origin_lon},
                  {"origin_lat", cfg.frame.origin_lat}}},
                {"world",
                 {{"num_roads", cfg.world.num_roads},
                  {"min_lines", cfg.world.min_lines},
                  {"max_lines", cfg.world.max_lines},
                  {"max_curvature", cfg.world.max_curvature},
                  {"lane_spacing", cfg.world.lane_spacing},
                  {"min_length", cfg.world.min_length},
                  {"max_length", cfg.world.max_length},
                  {"extent", cfg.world.extent},
                  {"fixtures", cfg.world.fixtures},
                  {"seed", cfg.world.seed}}}};
  j["output_dir"] = cfg.output_dir;
  j["tile"] = {{"pixel_size", cfg.pixel_size},
               {"width", cfg.tile_width},
               {"height", cfg.tile_height},
               {"spacing", cfg.road_spacing}};
  j["render"] = {{"stroke_width", cfg.stroke_width},
                 {"lane_threshold", cfg.lane_threshold},
                 {"corruption",
                  {{"dropout", cfg.corruption.dropout_fraction},
                   {"jitter_sigma", cfg.corruption.jitter_sigma},
                   {"blur_radius", cfg.corruption.blur_radius}}}};
  j["cluster_mapper"] = dbscan_json(cfg.cluster_dbscan);
  j["cluster_mapper"]["dedup_cell"] = cfg.dedup_cell;
  j["graph_mapper"] = dbscan_json(cfg.graph_dbscan);
  j["graph_mapper"]["merge_radius"] = cfg.merge_radius;
  j["merger"] = {{"mode", cfg.mapper == MapperMode::kFused ? "fused" : "cluster_only"},
                 {"simplify_tolerance", cfg.merger.simplify_tolerance},
                 {"inversion_step", cfg.merger.inversion_step},
                 {"inversion_fraction", cfg.merger.inversion_fraction},
                 {"chain_radius", cfg.merger.chain_radius},
                 {"sparse_fraction", cfg.merger.sparse_fraction},
                 {"density_radius", cfg.merger.density_radius}};
  j["evaluation"] = {{"enabled", cfg.evaluate},
                     {"thresholds", cfg.thresholds},
                     {"match_cutoff", cfg.match_cutoff},
                     {"raster_metrics", cfg.raster_metrics},
                     {"lane_count", dbscan_json(cfg.lane_count_dbscan)}};
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j;
}

PipelineConfig config_from_json(const json& j, PipelineConfig cfg) {
  check_keys(j, "config",
             {"input", "output_dir", "tile", "render", "cluster_mapper", "graph_mapper", "merger", "evaluation",
              "seed", "threads"});
  if (j.contains("input")) {
    const auto& in = j["input"];
    check_keys(in, "input", {"roads", "gt", "images", "frame", "world"});
    read(in, "roads", cfg.roads_path, "input");
    read(in, "gt", cfg.gt_path, "input");
    read(in, "images", cfg.images_dir, "input");
    if (in.contains("frame")) {
      const auto& f = in["frame"];
      check_keys(f, "input.frame", {"kind", "origin_lon", "origin_lat"});
      std::string kind = cfg.frame.kind == CoordinateFrame::Kind::kLonLat ? "lonlat" : "planar";
      read(f, "kind", kind, "input.frame");
      if (kind != "planar" && kind != "lonlat") throw Error(ErrorKind::kConfig, "input.frame.kind must be planar or lonlat");
      cfg.frame.kind = kind == "lonlat" ? CoordinateFrame::Kind::kLonLat : CoordinateFrame::Kind::kPlanar;
      read(f, "origin_lon", cfg.frame.origin_lon, "input.frame");
      read(f, "origin_lat", cfg.frame.origin_lat, "input.frame");
    }
    if (in.contains("world")) {
      const auto& w = in["world"];
      check_keys(w, "input.world",
                 {"num_roads", "min_lines", "max_lines", "max_curvature", "lane_spacing", "min_length", "max_length",
                  "extent", "fixtures", "seed"});
      read(w, "num_roads", cfg.world.num_roads, "input.world");
      read(w, "min_lines", cfg.world.min_lines, "input.world");
      read(w, "max_lines", cfg.world.max_lines, "input.world");
      read(w, "max_curvature", cfg.world.max_curvature, "input.world");
      read(w, "lane_spacing", cfg.world.lane_spacing, "input.world");
      read(w, "min_length", cfg.world.min_length, "input.world");
      read(w, "max_length", cfg.world.max_length, "input.world");
      read(w, "extent", cfg.world.extent, "input.world");
      read(w, "fixtures", cfg.world.fixtures, "input.world");
      read(w, "seed", cfg.world.seed, "input.world");
    }
  }
  read(j, "output_dir", cfg.output_dir, "config");
  if (j.contains("tile")) {
    const auto& t = j["tile"];
    check_keys(t, "tile", {"pixel_size", "width", "height", "spacing"});
    read(t, "pixel_size", cfg.pixel_size, "tile");
    read(t, "width", cfg.tile_width, "tile");
    read(t, "height", cfg.tile_height, "tile");
    read(t, "spacing", cfg.road_spacing, "tile");
  }
  if (j.contains("render")) {
    const auto& r = j["render"];
    check_keys(r, "render", {"stroke_width", "lane_threshold", "corruption"});
    read(r, "stroke_width", cfg.stroke_width, "render");
    read(r, "lane_threshold", cfg.lane_threshold, "render");
    if (r.contains("corruption")) {
      const auto& c = r["corruption"];
      check_keys(c, "render.corruption", {"dropout", "jitter_sigma", "blur_radius"});
      read(c, "dropout", cfg.corruption.dropout_fraction, "render.corruption");
      read(c, "jitter_sigma", cfg.corruption.jitter_sigma, "render.corruption");
      read(c, "blur_radius", cfg.corruption.blur_radius, "render.corruption");
    }
  }
  if (j.contains("cluster_mapper")) {
    const auto& c = j["cluster_mapper"];
    check_keys(c, "cluster_mapper", {"eps", "min_pts", "dedup_cell"});
    read_dbscan(c, cfg.cluster_dbscan, "cluster_mapper");
    read(c, "dedup_cell", cfg.dedup_cell, "cluster_mapper");
  }
  if (j.contains("graph_mapper")) {
    const auto& g = j["graph_mapper"];
    check_keys(g, "graph_mapper", {"eps", "min_pts", "merge_radius"});
    read_dbscan(g, cfg.graph_dbscan, "graph_mapper");
    read(g, "merge_radius", cfg.merge_radius, "graph_mapper");
  }
  if (j.contains("merger")) {
    const auto& m = j["merger"];
    check_keys(m, "merger", {"mode", "simplify_tolerance", "inversion_step", "inversion_fraction", "chain_radius",
                          "sparse_fraction", "density_radius"});
    std::string mode = cfg.mapper == MapperMode::kFused ? "fused" : "cluster_only";
    read(m, "mode", mode, "merger");
    if (mode != "fused" && mode != "cluster_only") throw Error(ErrorKind::kConfig, "merger.mode must be fused or cluster_only");
    cfg.mapper = mode == "fused" ? MapperMode::kFused : MapperMode::kClusterOnly;
    read(m, "simplify_tolerance", cfg.merger.simplify_tolerance, "merger");
    read(m, "inversion_step", cfg.merger.inversion_step, "merger");
    read(m, "inversion_fraction", cfg.merger.inversion_fraction, "merger");
    read(m, "chain_radius", cfg.merger.chain_radius, "merger");
    read(m, "sparse_fraction", cfg.merger.sparse_fraction, "merger");
    read(m, "density_radius", cfg.merger.density_radius, "merger");
  }
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    check_keys(e, "evaluation", {"enabled", "thresholds", "match_cutoff", "raster_metrics", "lane_count"});
    read(e, "enabled", cfg.evaluate, "evaluation");
    read(e, "thresholds", cfg.thresholds, "evaluation");
    read(e, "match_cutoff", cfg.match_cutoff, "evaluation");
    read(e, "raster_metrics", cfg.raster_metrics, "evaluation");
    if (e.contains("lane_count")) {
      check_keys(e["lane_count"], "evaluation.lane_count", {"eps", "min_pts"});
      read_dbscan(e["lane_count"], cfg.lane_count_dbscan, "evaluation.lane_count");
    }
  }
  read(j, "seed", cfg.seed, "config");
  read(j, "threads", cfg.threads, "config");
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, "malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace lanemap

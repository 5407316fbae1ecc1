#include "lanemap/geojson_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void feature_error(std::size_t index, const std::string& what) {
  throw Error(ErrorKind::kParse, "feature " + std::to_string(index) + ": " + what);
}

json frame_to_json(const CoordinateFrame& f) {
  json j;
  j["kind"] = f.kind == CoordinateFrame::Kind::kLonLat ? "lonlat" : "planar";
  j["origin_lon"] = f.origin_lon;
  j["origin_lat"] = f.origin_lat;
  return j;
}

CoordinateFrame frame_from_json(const json& j) {
  CoordinateFrame f;
  const std::string kind = j.value("kind", "planar");
  if (kind == "lonlat") {
    f.kind = CoordinateFrame::Kind::kLonLat;
  } else if (kind != "planar") {
    throw Error(ErrorKind::kParse, "unknown frame kind '" + kind + "'");
  }
  f.origin_lon = j.value("origin_lon", 0.0);
  f.origin_lat = j.value("origin_lat", 0.0);
  return f;
}

json coords(const std::vector<GlobalPoint>& line, const CoordinateFrame& frame) {
  json arr = json::array();
  for (const auto& p : line) {
    if (frame.kind == CoordinateFrame::Kind::kLonLat) {
      const auto ll = unproject_lonlat(p, frame);
      arr.push_back({ll[0], ll[1]});
    } else {
      arr.push_back({p.x, p.y});
    }
  }
  return arr;
}

json line_feature(const std::vector<GlobalPoint>& line, const CoordinateFrame& frame, json props) {
  json f;
  f["type"] = "Feature";
  f["properties"] = std::move(props);
  f["geometry"] = {{"type", "LineString"}, {"coordinates", coords(line, frame)}};
  return f;
}

}  // namespace

std::string map_to_geojson(const HDMap& map) {
  json doc;
  doc["type"] = "FeatureCollection";
  doc["frame"] = frame_to_json(map.frame);
  json stats = json::array();
  for (const auto& s : map.road_stats) {
    stats.push_back({{"road_id", s.road_id},
                     {"clusters", s.clusters},
                     {"edges", s.edges},
                     {"lanes", s.lanes},
                     {"unmatched_clusters", s.unmatched_clusters},
                     {"unmatched_edges", s.unmatched_edges},
                     {"noise_points", s.noise_points}});
  }
  doc["road_stats"] = stats;
  json features = json::array();
  for (const auto& lane : map.lanes) {
    json props;
    props["id"] = lane.id;
    props["road_id"] = lane.road_id;
    props["lane_class"] = std::string(to_string(lane.lane_class));
    if (lane.cluster_id) props["cluster_id"] = *lane.cluster_id;
    if (lane.edge_id) props["edge_id"] = *lane.edge_id;
    features.push_back(line_feature(lane.polyline, map.frame, std::move(props)));
  }
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

HDMap map_from_geojson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("malformed map GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw Error(ErrorKind::kParse, "top-level object must be a FeatureCollection");
  }
  HDMap map;
  if (doc.contains("frame")) map.frame = frame_from_json(doc["frame"]);
  try {
    if (doc.contains("road_stats")) {
      for (const auto& s : doc["road_stats"]) {
        RoadStats rs;
        rs.road_id = s.at("road_id").get<std::string>();
        rs.clusters = s.value("clusters", std::int64_t{0});
        rs.edges = s.value("edges", std::int64_t{0});
        rs.lanes = s.value("lanes", std::int64_t{0});
        rs.unmatched_clusters = s.value("unmatched_clusters", std::int64_t{0});
        rs.unmatched_edges = s.value("unmatched_edges", std::int64_t{0});
        rs.noise_points = s.value("noise_points", std::int64_t{0});
        map.road_stats.push_back(std::move(rs));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad road_stats: ") + e.what());
  }

  const auto& features = doc["features"];
  for (std::size_t index = 0; index < features.size(); ++index) {
    const auto& f = features[index];
    try {
      const auto& geom = f.at("geometry");
      if (geom.at("type") != "LineString") feature_error(index, "geometry must be a LineString");
      const auto& props = f.at("properties");
      Lane lane;
      lane.id = props.at("id").get<LaneId>();
      lane.road_id = props.at("road_id").get<std::string>();
      lane.lane_class = lane_class_from_string(props.at("lane_class").get<std::string>());
      if (props.contains("cluster_id")) lane.cluster_id = props["cluster_id"].get<std::int64_t>();
      if (props.contains("edge_id")) lane.edge_id = props["edge_id"].get<std::int64_t>();
      for (const auto& c : geom.at("coordinates")) {
        if (!c.is_array() || c.size() < 2) feature_error(index, "coordinate must be [x, y]");
        const double a = c[0].get<double>();
        const double b = c[1].get<double>();
        lane.polyline.push_back(map.frame.kind == CoordinateFrame::Kind::kLonLat ? project_lonlat(a, b, map.frame)
                                                                                 : GlobalPoint{a, b});
      }
      validate(lane);
      map.lanes.push_back(std::move(lane));
    } catch (const json::exception& e) {
      feature_error(index, e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) throw;
      feature_error(index, e.what());
    }
  }
  validate(map);
  return map;
}

void export_geojson(const HDMap& map, const std::filesystem::path& path) {
  write_text_file(path, map_to_geojson(map));
}

HDMap import_geojson(const std::filesystem::path& path) { return map_from_geojson(read_text_file(path)); }

std::string roads_to_geojson(const RoadNetwork& network) {
  json doc;
  doc["type"] = "FeatureCollection";
  json features = json::array();
  for (const auto& road : network.roads) {
    json props;
    props["id"] = road.id;
    if (road.lane_count) props["lanes"] = *road.lane_count;
    features.push_back(line_feature(road.polyline, network.frame, std::move(props)));
  }
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp);
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lanemap

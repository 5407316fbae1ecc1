#pragma once

#include <filesystem>
#include <string>

#include "lanemap/hd_map.hpp"
#include "lanemap/road_network.hpp"

namespace lanemap {

// HD map <-> GeoJSON FeatureCollection.  Each lane is a LineString Feature with
// properties {id, road_id, lane_class} plus cluster_id / edge_id when known.
// The collection carries "frame" and "road_stats" members.  Coordinates are
// planar meters, or lon/lat when the map's frame is lon/lat.  Numbers are
// written in shortest round-trip form, so the round trip is exact.
std::string map_to_geojson(const HDMap& map);
HDMap map_from_geojson(const std::string& text);

void export_geojson(const HDMap& map, const std::filesystem::path& path);
HDMap import_geojson(const std::filesystem::path& path);

// Roads as LineString Features with properties {id, lanes}; readable by
// parse_road_network.
std::string roads_to_geojson(const RoadNetwork& network);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lanemap

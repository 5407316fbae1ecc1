#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lanemap/lane_raster.hpp"

namespace lanemap {

// 8-bit RGB PNG; channel k of the image goes to color channel k with
// value round(255 * intensity).
void write_lane_png(const std::filesystem::path& path, const LaneImage& img);
LaneImage read_lane_png(const std::filesystem::path& path, const TileSpec& tile);

struct ManifestEntry {
  std::string tile_id;
  TileSpec tile;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// One line per tile: `tile_id x y heading p w h`.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Tile ids are `<road_id>:<index>`.
std::string make_tile_id(const std::string& road_id, std::size_t index);
std::string road_id_of_tile(const std::string& tile_id);
// File name for a tile's PNG: the tile id with unsafe characters
// percent-encoded, plus ".png".
std::string tile_png_name(const std::string& tile_id);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace lanemap

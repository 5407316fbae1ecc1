#include "lanemap/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

[[noreturn]] void feature_error(std::size_t index, const std::string& what) {
  throw Error(ErrorKind::kParse, "feature " + std::to_string(index) + ": " + what);
}

std::string feature_id(const json& feature, std::size_t index) {
  const auto props = feature.find("properties");
  if (props != feature.end() && props->is_object()) {
    const auto id = props->find("id");
    if (id != props->end()) {
      if (id->is_string()) return id->get<std::string>();
      if (id->is_number_integer()) return std::to_string(id->get<long long>());
      feature_error(index, "property 'id' must be a string or integer");
    }
  }
  return "road_" + std::to_string(index);
}

}  // namespace

GlobalPoint project_lonlat(double lon, double lat, const CoordinateFrame& frame) {
  const double x = kEarthRadiusM * (lon - frame.origin_lon) * kDegToRad *
                   std::cos(frame.origin_lat * kDegToRad);
  const double y = kEarthRadiusM * (lat - frame.origin_lat) * kDegToRad;
  return {x, y};
}

std::array<double, 2> unproject_lonlat(GlobalPoint pt, const CoordinateFrame& frame) {
  const double lat = frame.origin_lat + pt.y / (kEarthRadiusM * kDegToRad);
  const double lon = frame.origin_lon +
                     pt.x / (kEarthRadiusM * kDegToRad * std::cos(frame.origin_lat * kDegToRad));
  return {lon, lat};
}

void validate(const Road& road) {
  if (road.polyline.size() < 2) {
    throw Error(ErrorKind::kInputDomain, "road '" + road.id + "' has fewer than 2 vertices");
  }
  for (std::size_t i = 0; i < road.polyline.size(); ++i) {
    const auto& p = road.polyline[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kInputDomain, "road '" + road.id + "' has a non-finite vertex");
    }
    if (i > 0 && p == road.polyline[i - 1]) {
      throw Error(ErrorKind::kInputDomain, "road '" + road.id + "' repeats a vertex");
    }
  }
}

RoadNetwork parse_road_network_text(const std::string& text, const CoordinateFrame& frame) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "malformed GeoJSON at line " +
                                       std::to_string(line_of_offset(text, e.byte)) + ": " +
                                       e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorKind::kParse, "top-level object must be a FeatureCollection");
  }

  RoadNetwork network;
  network.frame = frame;
  const auto& features = doc["features"];
  for (std::size_t index = 0; index < features.size(); ++index) {
    const auto& feature = features[index];
    if (!feature.is_object() || !feature.contains("geometry") || !feature["geometry"].is_object()) {
      feature_error(index, "missing geometry");
    }
    const auto& geometry = feature["geometry"];
    if (geometry.value("type", "") != "LineString") {
      feature_error(index, "geometry must be a LineString");
    }
    if (!geometry.contains("coordinates") || !geometry["coordinates"].is_array()) {
      feature_error(index, "LineString without coordinates");
    }

    Road road;
    road.id = feature_id(feature, index);
    if (road.id.find_first_of(" \t\r\n") != std::string::npos) {
      feature_error(index, "road id '" + road.id + "' contains whitespace");
    }
    const auto& props = feature.contains("properties") ? feature["properties"] : json();
    if (props.is_object() && props.contains("lanes") && !props["lanes"].is_null()) {
      if (!props["lanes"].is_number_integer()) feature_error(index, "'lanes' must be an integer");
      road.lane_count = props["lanes"].get<int>();
    }

    std::size_t dropped = 0;
    for (const auto& coord : geometry["coordinates"]) {
      if (!coord.is_array() || coord.size() < 2 || !coord[0].is_number() || !coord[1].is_number()) {
        feature_error(index, "coordinate must be [x, y]");
      }
      const double a = coord[0].get<double>();
      const double b = coord[1].get<double>();
      if (!std::isfinite(a) || !std::isfinite(b)) feature_error(index, "non-finite coordinate");
      const GlobalPoint p =
          frame.kind == CoordinateFrame::Kind::kLonLat ? project_lonlat(a, b, frame) : GlobalPoint{a, b};
      if (!road.polyline.empty() && road.polyline.back() == p) {
        ++dropped;
        continue;
      }
      road.polyline.push_back(p);
    }
    if (dropped > 0) {
      network.warnings.push_back("road '" + road.id + "': dropped " + std::to_string(dropped) +
                                 " repeated vertex(es)");
    }
    if (road.polyline.size() < 2) {
      throw Error(ErrorKind::kInputDomain,
                  "road '" + road.id + "' (feature " + std::to_string(index) + ") has zero length");
    }
    network.roads.push_back(std::move(road));
  }
  return network;
}

RoadNetwork parse_road_network(const std::filesystem::path& path, const CoordinateFrame& frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open road file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_road_network_text(buffer.str(), frame);
}

std::vector<RoadPoint> interpolate_road(const Road& road, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::kInputDomain, "interpolation spacing must be > 0");
  }
  validate(road);

  const auto& line = road.polyline;
  std::vector<double> cumulative(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + distance(line[i - 1], line[i]);
  }
  const double total = cumulative.back();
  const auto count = static_cast<std::size_t>(std::floor(total / spacing + 1e-9)) + 1;

  std::vector<RoadPoint> points;
  points.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = std::min(static_cast<double>(k) * spacing, total);
    // A point exactly on a vertex takes the heading of the segment leaving it.
    while (seg + 2 < line.size() && cumulative[seg + 1] <= s) ++seg;
    const GlobalPoint a = line[seg];
    const GlobalPoint b = line[seg + 1];
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double t = std::clamp((s - cumulative[seg]) / seg_len, 0.0, 1.0);
    RoadPoint rp;
    rp.road_id = road.id;
    rp.position = a + t * (b - a);
    rp.heading = std::atan2(b.y - a.y, b.x - a.x);
    rp.arclength = s;
    points.push_back(std::move(rp));
  }
  return points;
}

std::vector<RoadPoint> fit_window(std::span<const RoadPoint> road_points, const TileSpec& tile) {
  std::vector<RoadPoint> window;
  for (const auto& rp : road_points) {
    if (tile.covers(rp.position)) window.push_back(rp);
  }
  return window;
}

ShapeCoeffs fit_road_shape(const RoadPoint& rp, std::span<const RoadPoint> window) {
  if (window.size() < 3) {
    throw Error(ErrorKind::kDegenerateWindow, "shape fit needs at least 3 road points, got " +
                                                  std::to_string(window.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(window.size());
  ys.reserve(window.size());
  double scale = 0.0;
  for (const auto& w : window) {
    const GlobalPoint local = rotate(w.position - rp.position, -rp.heading);
    xs.push_back(local.x);
    ys.push_back(local.y);
    scale = std::max(scale, std::abs(local.x));
  }

  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  const double tol = 1e-9 * std::max(1.0, scale);
  std::size_t n_distinct = distinct.empty() ? 0 : 1;
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    if (distinct[i] - distinct[i - 1] > tol) ++n_distinct;
  }
  if (n_distinct < 3) {
    throw Error(ErrorKind::kDegenerateFit,
                "shape fit needs 3 distinct along-road positions, got " + std::to_string(n_distinct));
  }

  // Normal equations in the scaled variable t = x'/scale, solved by Gaussian
  // elimination with partial pivoting.
  double m[3][4] = {};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double t = xs[i] / scale;
    const double basis[3] = {t * t, t, 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
      m[r][3] += basis[r] * ys[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-14) {
      throw Error(ErrorKind::kDegenerateFit, "singular shape-fit system");
    }
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  ShapeCoeffs out;
  out.a = m[0][3] / m[0][0] / (scale * scale);
  out.b = m[1][3] / m[1][1] / scale;
  out.c = m[2][3] / m[2][2];

  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = out.a * xs[i] * xs[i] + out.b * xs[i] + out.c - ys[i];
    sse += r * r;
  }
  out.rms_residual = std::sqrt(sse / static_cast<double>(xs.size()));
  return out;
}

}  // namespace lanemap

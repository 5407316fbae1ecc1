#include "lanemap/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

struct Piece {
  double length;
  double curvature;
};

struct Sample {
  GlobalPoint position;
  double heading;
  double s;
};

// Samples a curve of piecewise constant curvature every `step` meters (the end
// point is always included).  Positions are integrated in closed form.
std::vector<Sample> sample_curve(const std::vector<Piece>& pieces, double heading0, double step) {
  std::vector<Sample> out;
  GlobalPoint p{0.0, 0.0};
  double heading = heading0;
  double s = 0.0;
  out.push_back({p, heading, s});
  for (const Piece& piece : pieces) {
    double done = 0.0;
    while (done < piece.length - 1e-9) {
      const double next_mark = std::floor((s + 1e-9) / step + 1.0) * step;
      const double d = std::min(next_mark - s, piece.length - done);
      const double k = piece.curvature;
      if (k == 0.0) {
        p = p + d * GlobalPoint{std::cos(heading), std::sin(heading)};
      } else {
        p = p + GlobalPoint{(std::sin(heading + k * d) - std::sin(heading)) / k,
                            (std::cos(heading) - std::cos(heading + k * d)) / k};
      }
      heading += k * d;
      done += d;
      s += d;
      if (std::abs(s / step - std::round(s / step)) < 1e-9 || done >= piece.length - 1e-9) {
        if (out.back().s < s - 1e-9) out.push_back({p, heading, s});
      }
    }
  }
  return out;
}

GlobalPoint left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

LaneClass line_class(int k, int n) {
  if (k == n - 1) return LaneClass::kYellow;  // largest offset = leftmost
  if (k == 0) return LaneClass::kWhite;
  return LaneClass::kBrokenWhite;
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct RoadDraft {
  std::vector<Sample> samples;
  std::vector<Lane> lanes;
  int lines = 0;
};

RoadDraft parallel_lines(std::vector<Sample> samples, int lines, double spacing) {
  RoadDraft d;
  d.samples = std::move(samples);
  d.lines = lines;
  for (int k = 0; k < lines; ++k) {
    const double offset = (k - 0.5 * (lines - 1)) * spacing;
    Lane lane;
    lane.lane_class = line_class(k, lines);
    for (const Sample& s : d.samples) lane.polyline.push_back(s.position + offset * left_normal(s.heading));
    d.lanes.push_back(std::move(lane));
  }
  return d;
}

RoadDraft u_turn(double heading0, double spacing) {
  const double radius = 12.0;
  auto samples = sample_curve({{25.0, 0.0}, {std::numbers::pi * radius, 1.0 / radius}, {25.0, 0.0}}, heading0, 1.0);
  return parallel_lines(std::move(samples), 2, spacing);
}

RoadDraft y_split(double heading0, double spacing) {
  const double length = 100.0, split_at = 40.0, ramp = 30.0;
  RoadDraft d = parallel_lines(sample_curve({{length, 0.0}}, heading0, 1.0), 2, spacing);
  // Line 0 (right) becomes a middle line; the new right line peels off it.
  d.lanes[0].lane_class = LaneClass::kBrokenWhite;
  Lane branch;
  branch.lane_class = LaneClass::kWhite;
  for (const Sample& s : d.samples) {
    if (s.s < split_at - 1e-9) continue;
    const double offset = -0.5 * spacing - spacing * smoothstep((s.s - split_at) / ramp);
    branch.polyline.push_back(s.position + offset * left_normal(s.heading));
  }
  d.lanes.push_back(std::move(branch));
  d.lines = 3;
  return d;
}

}  // namespace

std::string road_name(int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "road_" + digits;
}

void validate(const SyntheticWorldSpec& spec) {
  if (spec.num_roads < 0) throw Error(ErrorKind::kConfig, "num_roads must be >= 0");
  if (spec.min_lines < 2 || spec.max_lines < spec.min_lines || spec.max_lines > 8) {
    throw Error(ErrorKind::kConfig, "lines per road must satisfy 2 <= min <= max <= 8");
  }
  if (!(spec.lane_spacing > 0.0)) throw Error(ErrorKind::kConfig, "lane_spacing must be > 0");
  if (!(spec.max_curvature >= 0.0) ||
      spec.max_curvature * 0.5 * (spec.max_lines - 1) * spec.lane_spacing >= 1.0) {
    throw Error(ErrorKind::kConfig, "max_curvature must be >= 0 and keep offset lines regular");
  }
  if (!(spec.min_length >= 2.0) || spec.max_length < spec.min_length) {
    throw Error(ErrorKind::kConfig, "road lengths must satisfy 2 <= min <= max");
  }
  if (!(spec.extent > 0.0)) throw Error(ErrorKind::kConfig, "extent must be > 0");
}

SyntheticWorld generate_world(const SyntheticWorldSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const int n = spec.num_roads;
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const int rows = std::max(1, (n + cols - 1) / cols);
  // Keep neighboring roads outside each other's tiles.
  const double cell = std::max(spec.extent / std::max(cols, rows), spec.max_length + 100.0);

  SyntheticWorld world;
  LaneId next_id = 0;
  for (int i = 0; i < n; ++i) {
    const double heading0 = uniform(-std::numbers::pi, std::numbers::pi);
    RoadDraft draft;
    if (spec.fixtures && n >= 2 && i == 0) {
      draft = u_turn(heading0, spec.lane_spacing);
    } else if (spec.fixtures && n >= 2 && i == 1) {
      draft = y_split(heading0, spec.lane_spacing);
    } else {
      const double length = uniform(spec.min_length, spec.max_length);
      const int lines = spec.min_lines + static_cast<int>(unit(rng) * (spec.max_lines - spec.min_lines + 1));
      std::vector<Piece> pieces;
      const int num_pieces = 3;
      for (int k = 0; k < num_pieces; ++k) {
        pieces.push_back({length / num_pieces, uniform(-spec.max_curvature, spec.max_curvature)});
      }
      draft = parallel_lines(sample_curve(pieces, heading0, 1.0), std::min(lines, spec.max_lines),
                             spec.lane_spacing);
    }

    // Center the road's bounding box in its grid cell.
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const Sample& s : draft.samples) {
      lo_x = std::min(lo_x, s.position.x);
      hi_x = std::max(hi_x, s.position.x);
      lo_y = std::min(lo_y, s.position.y);
      hi_y = std::max(hi_y, s.position.y);
    }
    const GlobalPoint cell_center{(i % cols + 0.5) * cell - 0.5 * cols * cell,
                                  (i / cols + 0.5) * cell - 0.5 * rows * cell};
    const GlobalPoint shift = cell_center - GlobalPoint{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)};

    Road road;
    road.id = road_name(i);
    road.lane_count = draft.lines - 1;
    for (const Sample& s : draft.samples) road.polyline.push_back(s.position + shift);
    world.network.roads.push_back(std::move(road));
    for (Lane& lane : draft.lanes) {
      for (GlobalPoint& p : lane.polyline) p = p + shift;
      lane.id = next_id++;
      lane.road_id = road_name(i);
      world.gt.lanes.push_back(std::move(lane));
    }
  }
  return world;
}

}  // namespace lanemap

#include "lanemap/cluster_mapper.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "lanemap/error.hpp"

namespace lanemap {

bool canonical_less(const LanePoint& a, const LanePoint& b) {
  if (a.position.x != b.position.x) return a.position.x < b.position.x;
  if (a.position.y != b.position.y) return a.position.y < b.position.y;
  return a.source.key() < b.source.key();
}

std::vector<LanePoint> dedup_lane_points(std::span<const LanePoint> points, double dedup_cell,
                                         std::vector<std::uint32_t>* multiplicity) {
  if (!(dedup_cell > 0.0)) throw Error(ErrorKind::kInputDomain, "dedup cell must be > 0");
  struct CellHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      const auto h = static_cast<std::uint64_t>(k.first) * 0x9E3779B97F4A7C15ULL ^
                     static_cast<std::uint64_t>(k.second);
      return static_cast<std::size_t>(h ^ (h >> 31));
    }
  };
  struct Slot {
    std::size_t index;
    std::uint32_t count;
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, Slot, CellHash> keep;
  keep.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i].position;
    const std::pair<std::int64_t, std::int64_t> cell{
        static_cast<std::int64_t>(std::floor(p.x / dedup_cell)),
        static_cast<std::int64_t>(std::floor(p.y / dedup_cell))};
    const auto [it, inserted] = keep.try_emplace(cell, Slot{i, 0});
    ++it->second.count;
    if (!inserted && points[i].source.key() < points[it->second.index].source.key()) it->second.index = i;
  }
  std::vector<Slot> slots;
  slots.reserve(keep.size());
  for (const auto& [cell, slot] : keep) slots.push_back(slot);
  std::sort(slots.begin(), slots.end(),
            [&](const Slot& a, const Slot& b) { return canonical_less(points[a.index], points[b.index]); });
  std::vector<LanePoint> out;
  out.reserve(slots.size());
  if (multiplicity) multiplicity->clear();
  for (const auto& slot : slots) {
    out.push_back(points[slot.index]);
    if (multiplicity) multiplicity->push_back(slot.count);
  }
  return out;
}

LaneClass majority_class(std::span<const LanePoint> points) {
  std::array<std::size_t, kNumLaneClasses> counts{};
  for (const auto& p : points) ++counts[static_cast<int>(p.lane_class)];
  const auto best = std::max_element(counts.begin(), counts.end());
  return static_cast<LaneClass>(best - counts.begin());
}

ClusterMapperResult cluster_road_lanes(std::span<const LanePoint> road_points,
                                       const DbscanParams& params, double dedup_cell) {
  validate(params);
  ClusterMapperResult result;
  result.params = params;
  result.input_points = road_points.size();
  if (road_points.empty()) return result;
  const std::uint32_t road = road_points.front().road;
  for (const auto& p : road_points) {
    if (p.road != road) {
      throw Error(ErrorKind::kInputDomain, "cluster_road_lanes received points from several roads");
    }
  }

  std::vector<std::uint32_t> multiplicity;
  const auto points = dedup_lane_points(road_points, dedup_cell, &multiplicity);
  result.duplicates_removed = road_points.size() - points.size();

  std::vector<GlobalPoint> positions;
  positions.reserve(points.size());
  for (const auto& p : points) positions.push_back(p.position);
  const auto db = dbscan(positions, params);
  result.noise_points = db.noise.size();

  result.clusters.reserve(db.clusters.size());
  for (std::size_t c = 0; c < db.clusters.size(); ++c) {
    LaneCluster cluster;
    cluster.id = static_cast<std::int64_t>(c);
    cluster.road = road;
    cluster.points.reserve(db.clusters[c].size());
    cluster.multiplicity.reserve(db.clusters[c].size());
    for (const std::size_t idx : db.clusters[c]) {
      cluster.points.push_back(points[idx]);
      cluster.multiplicity.push_back(multiplicity[idx]);
    }
    cluster.lane_class = majority_class(cluster.points);
    result.clusters.push_back(std::move(cluster));
  }
  return result;
}

}  // namespace lanemap

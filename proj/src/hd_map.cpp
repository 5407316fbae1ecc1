#include "lanemap/hd_map.hpp"

#include <cmath>
#include <unordered_set>

#include "lanemap/error.hpp"

namespace lanemap {

std::string_view to_string(LaneClass c) {
  switch (c) {
    case LaneClass::kBrokenWhite: return "broken_white";
    case LaneClass::kWhite: return "white";
    case LaneClass::kYellow: return "yellow";
  }
  return "white";
}

LaneClass lane_class_from_string(std::string_view name) {
  if (name == "broken_white") return LaneClass::kBrokenWhite;
  if (name == "white") return LaneClass::kWhite;
  if (name == "yellow") return LaneClass::kYellow;
  throw Error(ErrorKind::kParse, "unknown lane class '" + std::string(name) + "'");
}

void validate(const Lane& lane) {
  if (lane.polyline.size() < 2) {
    throw Error(ErrorKind::kInputDomain,
                "lane " + std::to_string(lane.id) + " has fewer than 2 points");
  }
  for (std::size_t i = 0; i < lane.polyline.size(); ++i) {
    const auto& p = lane.polyline[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kInputDomain, "lane " + std::to_string(lane.id) + " is not finite");
    }
    if (i > 0 && p == lane.polyline[i - 1]) {
      throw Error(ErrorKind::kInputDomain,
                  "lane " + std::to_string(lane.id) + " repeats a consecutive point");
    }
  }
}

void validate(const HDMap& map) {
  std::unordered_set<LaneId> ids;
  for (const auto& lane : map.lanes) {
    validate(lane);
    if (!ids.insert(lane.id).second) {
      throw Error(ErrorKind::kInputDomain, "duplicate lane id " + std::to_string(lane.id));
    }
  }
}

}  // namespace lanemap

#include "lanemap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lanemap/assignment.hpp"
#include "lanemap/error.hpp"
#include "lanemap/raster_io.hpp"

namespace lanemap {
namespace {

void check_same_size(const LaneImage& a, const LaneImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::kDimensionMismatch, "raster sizes differ");
  }
}

std::string fmt(const std::optional<double>& v) { return v ? format_double(*v) : "n/a"; }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

double lane_pair_distance(const Lane& a, const Lane& b) {
  if (a.polyline.size() < 2 || b.polyline.size() < 2) {
    throw Error(ErrorKind::kInputDomain, "lane distance needs lanes with >= 2 points");
  }
  const GlobalPoint sa = a.polyline.front(), ea = a.polyline.back();
  const GlobalPoint sb = b.polyline.front(), eb = b.polyline.back();
  const double same = distance(sa, sb) + distance(ea, eb);
  const double flipped = distance(sa, eb) + distance(ea, sb);
  return std::min(same, flipped) / 2.0;
}

Matching match_maps(const HDMap& constructed, const HDMap& gt, double cutoff) {
  Matching m;
  const std::size_t nc = constructed.lanes.size();
  const std::size_t ng = gt.lanes.size();
  WeightMatrix w(nc, ng);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < ng; ++j) w(i, j) = lane_pair_distance(constructed.lanes[i], gt.lanes[j]);
  }
  std::vector<char> c_used(nc, 0), g_used(ng, 0);
  for (const auto& [i, j] : min_assignment(w).pairs) {
    if (w(i, j) > cutoff) continue;
    m.pairs.push_back({constructed.lanes[i].id, gt.lanes[j].id, w(i, j)});
    c_used[i] = g_used[j] = 1;
  }
  for (std::size_t i = 0; i < nc; ++i) {
    if (!c_used[i]) m.unmatched_constructed.push_back(constructed.lanes[i].id);
  }
  for (std::size_t j = 0; j < ng; ++j) {
    if (!g_used[j]) m.unmatched_gt.push_back(gt.lanes[j].id);
  }
  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.constructed < b.constructed; });
  return m;
}

double map_coverage(const Matching& m, std::size_t gt_count) {
  if (gt_count == 0) throw Error(ErrorKind::kUndefinedMetric, "coverage needs at least one gt lane");
  return 100.0 * static_cast<double>(m.pairs.size()) / static_cast<double>(gt_count);
}

double map_accuracy(const Matching& m, double theta, std::size_t gt_count) {
  if (!(theta > 0.0)) throw Error(ErrorKind::kInputDomain, "accuracy threshold must be > 0");
  if (gt_count == 0) throw Error(ErrorKind::kUndefinedMetric, "accuracy needs at least one gt lane");
  const auto within = std::count_if(m.pairs.begin(), m.pairs.end(),
                                    [&](const MatchPair& p) { return p.distance < theta; });
  return 100.0 * static_cast<double>(within) / static_cast<double>(gt_count);
}

double mean_vertex_distance(const Matching& m) {
  if (m.pairs.empty()) throw Error(ErrorKind::kUndefinedMetric, "mean vertex distance needs a matched pair");
  double sum = 0.0;
  for (const auto& p : m.pairs) sum += p.distance;
  return sum / static_cast<double>(m.pairs.size());
}

RasterCounts& RasterCounts::operator+=(const RasterCounts& o) {
  for (int c = 0; c < kNumLaneClasses; ++c) {
    both[c] += o.both[c];
    pred_only[c] += o.pred_only[c];
    gt_only[c] += o.gt_only[c];
  }
  pixels += o.pixels;
  gt_lit += o.gt_lit;
  return *this;
}

RasterCounts raster_counts(const LaneImage& pred, const LaneImage& gt, double threshold) {
  check_same_size(pred, gt);
  RasterCounts c;
  for (std::int32_t v = 0; v < gt.height(); ++v) {
    for (std::int32_t u = 0; u < gt.width(); ++u) {
      const auto p = pixel_class(pred, u, v, threshold);
      const auto g = pixel_class(gt, u, v, threshold);
      ++c.pixels;
      if (g) ++c.gt_lit;
      if (p && g && *p == *g) {
        ++c.both[static_cast<int>(*p)];
        continue;
      }
      if (p) ++c.pred_only[static_cast<int>(*p)];
      if (g) ++c.gt_only[static_cast<int>(*g)];
    }
  }
  return c;
}

PixelAccuracy pixel_accuracy(const RasterCounts& c) {
  if (c.pixels == 0) throw Error(ErrorKind::kUndefinedMetric, "pixel accuracy of an empty raster");
  PixelAccuracy out;
  double sum = 0.0;
  for (int k = 0; k < kNumLaneClasses; ++k) {
    const double wrong = static_cast<double>(c.pred_only[k] + c.gt_only[k]);
    out.per_class[k] = 100.0 * (static_cast<double>(c.pixels) - wrong) / static_cast<double>(c.pixels);
    sum += out.per_class[k];
  }
  out.total = sum / kNumLaneClasses;
  return out;
}

PixelAccuracy pixel_accuracy(const LaneImage& pred, const LaneImage& gt) {
  return pixel_accuracy(raster_counts(pred, gt));
}

MiouResult miou(const RasterCounts& c) {
  MiouResult out;
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < kNumLaneClasses; ++k) {
    const auto uni = c.both[k] + c.pred_only[k] + c.gt_only[k];
    if (uni == 0) continue;
    out.per_class[k] = static_cast<double>(c.both[k]) / static_cast<double>(uni);
    sum += *out.per_class[k];
    ++present;
  }
  if (present > 0) out.mean = sum / present;
  return out;
}

MiouResult miou(const LaneImage& pred, const LaneImage& gt) { return miou(raster_counts(pred, gt)); }

double lane_ratio(const RasterCounts& c) {
  if (c.pixels == 0) throw Error(ErrorKind::kUndefinedMetric, "lane ratio of an empty raster");
  return 100.0 * static_cast<double>(c.gt_lit) / static_cast<double>(c.pixels);
}

std::size_t lane_count_discrepancy(const LaneImage& pred, std::size_t gt_lane_count,
                                   const DbscanParams& params) {
  std::vector<GlobalPoint> pts;
  for (const auto& px : extract_lane_pixels(pred)) {
    pts.push_back({static_cast<double>(px.pixel.u), static_cast<double>(px.pixel.v)});
  }
  const std::size_t found = dbscan(pts, params).clusters.size();
  return found > gt_lane_count ? found - gt_lane_count : gt_lane_count - found;
}

MetricsReport evaluate_maps(const HDMap& constructed, const HDMap& gt, const std::vector<double>& thresholds,
                            double cutoff) {
  MetricsReport r;
  r.gt_lanes = gt.lanes.size();
  r.constructed_lanes = constructed.lanes.size();
  const Matching m = match_maps(constructed, gt, cutoff);
  r.matched = m.pairs.size();
  if (r.gt_lanes > 0) r.coverage_pct = map_coverage(m, r.gt_lanes);
  for (const double t : thresholds) {
    r.accuracy_pct.emplace_back(t, r.gt_lanes > 0 ? std::optional(map_accuracy(m, t, r.gt_lanes)) : std::nullopt);
  }
  if (!m.pairs.empty()) r.mean_vertex_distance_m = mean_vertex_distance(m);
  return r;
}

std::string to_text(const MetricsReport& r) {
  std::ostringstream os;
  os << "gt_lanes = " << r.gt_lanes << '\n';
  os << "constructed_lanes = " << r.constructed_lanes << '\n';
  os << "matched = " << r.matched << '\n';
  os << "coverage_pct = " << fmt(r.coverage_pct) << '\n';
  for (const auto& [t, v] : r.accuracy_pct) os << "accuracy_pct@" << format_double(t) << " = " << fmt(v) << '\n';
  os << "mean_vertex_distance_m = " << fmt(r.mean_vertex_distance_m) << '\n';
  os << "raster_tiles = " << r.raster_tiles << '\n';
  if (r.pixel_accuracy) {
    for (int k = 0; k < kNumLaneClasses; ++k) {
      os << "pixel_accuracy_pct." << to_string(static_cast<LaneClass>(k)) << " = "
         << format_double(r.pixel_accuracy->per_class[k]) << '\n';
    }
    os << "pixel_accuracy_pct.total = " << format_double(r.pixel_accuracy->total) << '\n';
  }
  if (r.miou) {
    for (int k = 0; k < kNumLaneClasses; ++k) {
      os << "iou." << to_string(static_cast<LaneClass>(k)) << " = " << fmt(r.miou->per_class[k]) << '\n';
    }
    os << "miou = " << fmt(r.miou->mean) << '\n';
  }
  if (r.lane_ratio_pct) os << "lane_ratio_pct = " << format_double(*r.lane_ratio_pct) << '\n';
  if (r.mean_lane_count_discrepancy) {
    os << "lane_count_discrepancy_mean = " << format_double(*r.mean_lane_count_discrepancy) << '\n';
  }
  return os.str();
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["gt_lanes"] = r.gt_lanes;
  j["constructed_lanes"] = r.constructed_lanes;
  j["matched"] = r.matched;
  j["coverage_pct"] = opt_json(r.coverage_pct);
  auto acc = nlohmann::ordered_json::array();
  for (const auto& [t, v] : r.accuracy_pct) acc.push_back({{"threshold_m", t}, {"pct", opt_json(v)}});
  j["accuracy_pct"] = acc;
  j["mean_vertex_distance_m"] = opt_json(r.mean_vertex_distance_m);
  j["raster_tiles"] = r.raster_tiles;
  if (r.pixel_accuracy) {
    nlohmann::ordered_json pa;
    for (int k = 0; k < kNumLaneClasses; ++k) {
      pa[std::string(to_string(static_cast<LaneClass>(k)))] = r.pixel_accuracy->per_class[k];
    }
    pa["total"] = r.pixel_accuracy->total;
    j["pixel_accuracy_pct"] = pa;
  }
  if (r.miou) {
    nlohmann::ordered_json iou;
    for (int k = 0; k < kNumLaneClasses; ++k) {
      iou[std::string(to_string(static_cast<LaneClass>(k)))] = opt_json(r.miou->per_class[k]);
    }
    j["iou"] = iou;
    j["miou"] = opt_json(r.miou->mean);
  }
  if (r.lane_ratio_pct) j["lane_ratio_pct"] = *r.lane_ratio_pct;
  if (r.mean_lane_count_discrepancy) j["lane_count_discrepancy_mean"] = *r.mean_lane_count_discrepancy;
  return j;
}

}  // namespace lanemap

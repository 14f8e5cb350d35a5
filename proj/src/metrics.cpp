#include "elasticlane/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "elasticlane/assignment.hpp"
#include "elasticlane/error.hpp"

namespace elasticlane {

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void check_image(const ImageSize& image) {
  if (image.width <= 0 || image.height <= 0) throw InvalidArgument("image size must be positive");
}

std::vector<std::pair<int, double>> valid_points(const LanePolyline& lane) {
  std::vector<std::pair<int, double>> pts;
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (lane.valid[i]) pts.emplace_back(lane.rows[i], lane.xs[i]);
  }
  return pts;
}

void fill_span(BinaryMask& mask, int y, double xc, double half_width) {
  if (y < 0 || y >= mask.height) return;
  const double lo = std::ceil(xc - half_width);
  const double hi = std::ceil(xc + half_width);  // exclusive
  const int x0 = static_cast<int>(std::max(lo, 0.0));
  const int x1 = static_cast<int>(std::min(hi, static_cast<double>(mask.width)));
  for (int x = x0; x < x1; ++x) mask.pixels[static_cast<std::size_t>(y) * mask.width + x] = 1;
}

}  // namespace

std::size_t BinaryMask::area() const noexcept {
  return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

DetectionMetrics DetectionMetrics::from_counts(long tp, long fp, long fn) {
  DetectionMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

DetectionMetrics& DetectionMetrics::operator+=(const DetectionMetrics& other) {
  *this = from_counts(tp + other.tp, fp + other.fp, fn + other.fn);
  return *this;
}

TuSimpleMetrics TuSimpleMetrics::from_counts(long correct_points, long gt_points, long pred_lanes,
                                             long gt_lanes, long fp_lanes, long fn_lanes) {
  TuSimpleMetrics m;
  m.correct_points = correct_points;
  m.gt_points = gt_points;
  m.pred_lanes = pred_lanes;
  m.gt_lanes = gt_lanes;
  m.fp_lanes = fp_lanes;
  m.fn_lanes = fn_lanes;
  m.acc = safe_ratio(static_cast<double>(correct_points), static_cast<double>(gt_points));
  m.fp_rate = safe_ratio(static_cast<double>(fp_lanes), static_cast<double>(pred_lanes));
  m.fn_rate = safe_ratio(static_cast<double>(fn_lanes), static_cast<double>(gt_lanes));
  m.lanes = DetectionMetrics::from_counts(gt_lanes - fn_lanes, fp_lanes, fn_lanes);
  return m;
}

TuSimpleMetrics& TuSimpleMetrics::operator+=(const TuSimpleMetrics& other) {
  *this = from_counts(correct_points + other.correct_points, gt_points + other.gt_points,
                      pred_lanes + other.pred_lanes, gt_lanes + other.gt_lanes,
                      fp_lanes + other.fp_lanes, fn_lanes + other.fn_lanes);
  return *this;
}

BinaryMask rasterize_lane(const LanePolyline& lane, int width_px, const ImageSize& image) {
  if (width_px < 1) throw InvalidArgument("width_px must be >= 1");
  check_image(image);
  lane.validate();
  BinaryMask mask(image.width, image.height);
  const auto pts = valid_points(lane);
  const double half = 0.5 * width_px;
  if (pts.size() == 1) {
    fill_span(mask, pts[0].first, pts[0].second, half);
    return mask;
  }
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto [r0, x0] = pts[k];
    const auto [r1, x1] = pts[k + 1];
    const double slope = (x1 - x0) / static_cast<double>(r1 - r0);
    const double hw = half * std::sqrt(1.0 + slope * slope);
    for (int y = std::max(r0, 0); y <= std::min(r1, image.height - 1); ++y) {
      fill_span(mask, y, x0 + slope * (y - r0), hw);
    }
  }
  return mask;
}

double lane_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height || a.pixels.size() != b.pixels.size())
    throw ShapeMismatch("lane_iou: mask shapes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const bool pa = a.pixels[i] != 0;
    const bool pb = b.pixels[i] != 0;
    inter += (pa && pb) ? 1 : 0;
    uni += (pa || pb) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

DetectionMetrics match_and_score(const LaneSet& preds, const LaneSet& gts, double iou_thresh,
                                 int width_px) {
  if (!(preds.image == gts.image)) throw ShapeMismatch("match_and_score: image sizes differ");
  if (!std::isfinite(iou_thresh)) throw InvalidArgument("iou_thresh must be finite");
  const long np = static_cast<long>(preds.lanes.size());
  const long ng = static_cast<long>(gts.lanes.size());
  if (np == 0 || ng == 0) return DetectionMetrics::from_counts(0, np, ng);

  std::vector<BinaryMask> pm;
  std::vector<BinaryMask> gm;
  for (const auto& l : preds.lanes) pm.push_back(rasterize_lane(l, width_px, preds.image));
  for (const auto& l : gts.lanes) gm.push_back(rasterize_lane(l, width_px, gts.image));

  // Lexicographic objective: first the number of above-threshold pairs, then
  // total IoU. The bonus exceeds any achievable IoU sum.
  const double bonus = static_cast<double>(std::min(np, ng)) + 1.0;
  std::vector<std::vector<double>> iou(np, std::vector<double>(ng));
  std::vector<std::vector<double>> weight(np, std::vector<double>(ng));
  for (long i = 0; i < np; ++i) {
    for (long j = 0; j < ng; ++j) {
      iou[i][j] = lane_iou(pm[i], gm[j]);
      weight[i][j] = iou[i][j] + (iou[i][j] >= iou_thresh ? bonus : 0.0);
    }
  }
  const auto assigned = max_weight_assignment(weight);
  long tp = 0;
  for (long i = 0; i < np; ++i) {
    if (assigned[i] >= 0 && iou[i][assigned[i]] >= iou_thresh) ++tp;
  }
  return DetectionMetrics::from_counts(tp, np - tp, ng - tp);
}

TuSimpleMetrics tusimple_score(const LaneSet& preds, const LaneSet& gts, double x_thresh,
                               double match_frac) {
  if (!(x_thresh > 0.0)) throw InvalidArgument("x_thresh must be > 0");
  if (!(match_frac >= 0.0 && match_frac <= 1.0)) throw InvalidArgument("match_frac must lie in [0,1]");
  const std::vector<int>* rows = nullptr;
  for (const auto* set : {&preds, &gts}) {
    for (const auto& lane : set->lanes) {
      lane.validate();
      if (rows == nullptr) {
        rows = &lane.rows;
      } else if (lane.rows != *rows) {
        throw ShapeMismatch("tusimple_score: lanes are sampled on different row sets");
      }
    }
  }

  const long np = static_cast<long>(preds.lanes.size());
  const long ng = static_cast<long>(gts.lanes.size());
  long gt_points = 0;
  std::vector<long> gt_valid(ng, 0);
  for (long j = 0; j < ng; ++j) {
    gt_valid[j] = static_cast<long>(gts.lanes[j].valid_count());
    gt_points += gt_valid[j];
  }
  if (np == 0 || ng == 0) return TuSimpleMetrics::from_counts(0, gt_points, np, ng, np, ng);

  std::vector<std::vector<double>> correct(np, std::vector<double>(ng, 0.0));
  for (long i = 0; i < np; ++i) {
    const auto& p = preds.lanes[i];
    for (long j = 0; j < ng; ++j) {
      const auto& g = gts.lanes[j];
      long c = 0;
      for (std::size_t r = 0; r < g.size(); ++r) {
        if (g.valid[r] && p.valid[r] && std::abs(p.xs[r] - g.xs[r]) < x_thresh) ++c;
      }
      correct[i][j] = static_cast<double>(c);
    }
  }
  const auto assigned = max_weight_assignment(correct);
  long total_correct = 0;
  long matched = 0;
  for (long i = 0; i < np; ++i) {
    const int j = assigned[i];
    if (j < 0) continue;
    const long c = static_cast<long>(correct[i][j]);
    total_correct += c;
    if (gt_valid[j] > 0 && static_cast<double>(c) >= match_frac * static_cast<double>(gt_valid[j]))
      ++matched;
  }
  return TuSimpleMetrics::from_counts(total_correct, gt_points, np, ng, np - matched, ng - matched);
}

}  // namespace elasticlane

#pragma once

// CULane-style IoU/F1 lane scoring and TuSimple-style point accuracy.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "elasticlane/elm.hpp"

namespace elasticlane {

struct ImageSize {
  int width = 0;
  int height = 0;
  bool operator==(const ImageSize&) const = default;
};

/// Lanes of one image, in image pixel coordinates.
struct LaneSet {
  ImageSize image;
  std::vector<LanePolyline> lanes;
  std::string category;
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t area() const noexcept;
};

struct DetectionMetrics {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Rates with the zero conventions: 0 whenever a denominator vanishes.
  static DetectionMetrics from_counts(long tp, long fp, long fn);
  DetectionMetrics& operator+=(const DetectionMetrics& other);
};

struct TuSimpleMetrics {
  double acc = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  long correct_points = 0;
  long gt_points = 0;
  long pred_lanes = 0;
  long gt_lanes = 0;
  long fp_lanes = 0;
  long fn_lanes = 0;
  /// Lane-level detection counts: tp = matched lanes.
  DetectionMetrics lanes;

  static TuSimpleMetrics from_counts(long correct_points, long gt_points, long pred_lanes,
                                     long gt_lanes, long fp_lanes, long fn_lanes);
  TuSimpleMetrics& operator+=(const TuSimpleMetrics& other);
};

/// Stroke of the given width along the polyline, clipped to the image.
/// Each covered row spans [xc - hw, xc + hw) with hw = width/2 * sqrt(1 + slope^2).
BinaryMask rasterize_lane(const LanePolyline& lane, int width_px, const ImageSize& image);

double lane_iou(const BinaryMask& a, const BinaryMask& b);

DetectionMetrics match_and_score(const LaneSet& preds, const LaneSet& gts,
                                 double iou_thresh = 0.5, int width_px = 30);

TuSimpleMetrics tusimple_score(const LaneSet& preds, const LaneSet& gts, double x_thresh = 20.0,
                               double match_frac = 0.85);

}  // namespace elasticlane

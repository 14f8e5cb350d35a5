#pragma once

// Elastic Lane Map: implicit per-lane fields psi = H_sigma(phi) - 0.5 whose
// zero contour is the lane, built from row-sampled polylines.

#include <cstddef>
#include <vector>

#include "elasticlane/field.hpp"

namespace elasticlane {

/// Row-sampled lane: one x per listed row. Rows are strictly increasing grid
/// (or image) row indices; x is sub-pixel.
struct LanePolyline {
  std::vector<int> rows;
  std::vector<double> xs;
  std::vector<bool> valid;

  LanePolyline() = default;
  LanePolyline(std::vector<int> rows, std::vector<double> xs, std::vector<bool> valid);
  /// All rows valid.
  LanePolyline(std::vector<int> rows, std::vector<double> xs);

  /// Vertical lane at x covering rows [0, height).
  static LanePolyline vertical(double x, int height);

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t valid_count() const noexcept;

  /// Throws InvalidArgument unless sizes agree, rows strictly increase and
  /// valid xs are finite.
  void validate() const;
};

/// Per-row lane existence, one flag per grid row.
struct RangeMask {
  std::vector<bool> rows;

  RangeMask() = default;
  explicit RangeMask(std::vector<bool> r) : rows(std::move(r)) {}
  static RangeMask full(int height) { return RangeMask(std::vector<bool>(height, true)); }

  std::size_t size() const noexcept { return rows.size(); }
  bool operator[](std::size_t i) const { return rows[i]; }
  bool operator==(const RangeMask&) const = default;
};

struct HeavisideParams {
  double sigma = 3.0;

  HeavisideParams() = default;
  explicit HeavisideParams(double s);
};

/// sigma=5 for 18-row grids, sigma=3 otherwise (the 36-row default).
double default_sigma_for_rows(int rows) noexcept;

struct EncodedLane {
  Field2D psi;
  RangeMask range;
  /// Upper row of each valid-row pair whose |dx/drow| exceeds the band
  /// width 2 sigma; the row-wise decode is ill-posed there.
  std::vector<int> steep_rows;
};

/// N lane slots; existing slots form a prefix, sorted left to right.
struct ElmStack {
  int capacity = 0;
  std::vector<Field2D> fields;
  std::vector<bool> exists;
  std::vector<RangeMask> ranges;
  /// Index into the input list for each existing slot, -1 otherwise.
  std::vector<int> source_index;

  int count() const noexcept;
};

/// phi(x, row) = x - x_row; rows without a sample take the nearest valid row.
Field2D build_level_set(const LanePolyline& lane, const GridShape& shape);

double heaviside(double phi, double sigma) noexcept;
/// dH/dphi: 1/(2 sigma) inside the open band, 0 outside.
double heaviside_derivative(double phi, double sigma) noexcept;

Field2D smoothed_heaviside(const Field2D& phi, const HeavisideParams& p);

/// psi = H_sigma(phi) - 0.5 for an existing level set.
Field2D psi_from_level_set(const Field2D& phi, const HeavisideParams& p);

EncodedLane encode_lane(const LanePolyline& lane, const GridShape& shape,
                        const HeavisideParams& p);

/// Sub-pixel negative-to-positive zero crossing per masked row. The result
/// lists every grid row; rows without a crossing are invalid.
LanePolyline decode_lane(const Field2D& psi, const RangeMask& mask);

ElmStack order_and_pad(const std::vector<LanePolyline>& lanes, int capacity,
                       const GridShape& shape, const HeavisideParams& p);

/// Bottom-up scan (largest row first); a row jumping more than threshold px
/// from the last kept row is invalidated.
LanePolyline filter_departure_points(const LanePolyline& lane, double threshold = 50.0);

}  // namespace elasticlane

#pragma once

// Annotation ingest and artifact serialization: CULane-style lane text,
// binary PGM field dumps, trace CSV and JSON reports.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "elasticlane/elm.hpp"
#include "elasticlane/evolve.hpp"
#include "elasticlane/field.hpp"
#include "elasticlane/metrics.hpp"

namespace elasticlane {

struct AnnotationPoint {
  double x = 0.0;
  double y = 0.0;
  /// False for the x < 0 "no marking" sentinel.
  bool valid = true;
};

using AnnotationLane = std::vector<AnnotationPoint>;

struct AnnotationRecord {
  std::string image_id;
  std::vector<AnnotationLane> lanes;
};

/// One lane per nonempty line, whitespace-separated "x y" pairs. Throws
/// ParseError (1-based line) on an odd token count or a bad number.
AnnotationRecord parse_culane_lines(std::string_view text, std::string image_id = {});

/// Inverse of parse_culane_lines; shortest round-trip decimal formatting.
std::string format_culane_lines(const AnnotationRecord& record);

/// Resample onto `rows` by linear interpolation in y between valid points.
/// Rows outside the annotated y extent are invalid. x and y are multiplied
/// by sx and sy first (image to grid scaling).
LanePolyline to_polyline(const AnnotationLane& lane, const std::vector<int>& rows,
                         double sx = 1.0, double sy = 1.0);

/// Row-sampled lane back to annotation points (valid rows only).
AnnotationLane from_polyline(const LanePolyline& lane);

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Half-up quantization of (v - lo) / (hi - lo) * 255, clipped; the default
/// range [-0.5, 0.5] suits psi fields.
std::string write_field_pgm(const Field2D& f, double lo = -0.5, double hi = 0.5);

/// Reads a binary P5 image with maxval 255. Throws ParseError.
PgmImage read_pgm(std::string_view bytes);

struct TraceRow {
  int step = 0;
  double energy = 0.0;
  double lane_error = 0.0;
};

std::string write_trace_csv(const EvolutionTrace& t);
std::vector<TraceRow> parse_trace_csv(std::string_view text);

struct RunSummary {
  double final_energy = 0.0;
  double final_lane_error = 0.0;
  int steps = 0;
  bool converged = false;
};

RunSummary summarize(const EvolutionTrace& t);

nlohmann::ordered_json report_object(const DetectionMetrics& m);
/// Detection keys (on matched lanes) followed by acc, fp_rate, fn_rate.
nlohmann::ordered_json report_object(const TuSimpleMetrics& m);
nlohmann::ordered_json report_object(const RunSummary& s);

/// Compact single-line JSON followed by a newline.
std::string write_report_json(const nlohmann::ordered_json& report);

template <typename T>
std::string write_report_json(const T& value) {
  return write_report_json(report_object(value));
}

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace elasticlane

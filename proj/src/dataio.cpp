#include "elasticlane/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "elasticlane/error.hpp"

namespace elasticlane {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_number(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_g17(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

AnnotationRecord parse_culane_lines(std::string_view text, std::string image_id) {
  AnnotationRecord rec;
  rec.image_id = std::move(image_id);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() % 2 != 0)
      throw ParseError("odd number of coordinate tokens (" + std::to_string(tokens.size()) + ")", line_no);
    AnnotationLane lane;
    for (std::size_t k = 0; k < tokens.size(); k += 2) {
      const auto x = parse_number(tokens[k]);
      const auto y = parse_number(tokens[k + 1]);
      if (!x) throw ParseError("bad number '" + std::string(tokens[k]) + "'", line_no);
      if (!y) throw ParseError("bad number '" + std::string(tokens[k + 1]) + "'", line_no);
      lane.push_back({*x, *y, *x >= 0.0});
    }
    rec.lanes.push_back(std::move(lane));
  }
  return rec;
}

std::string format_culane_lines(const AnnotationRecord& record) {
  std::string out;
  for (const auto& lane : record.lanes) {
    for (std::size_t k = 0; k < lane.size(); ++k) {
      if (k > 0) out += ' ';
      out += format_double(lane[k].x);
      out += ' ';
      out += format_double(lane[k].y);
    }
    out += '\n';
  }
  return out;
}

LanePolyline to_polyline(const AnnotationLane& lane, const std::vector<int>& rows, double sx,
                         double sy) {
  if (!(sx > 0.0) || !(sy > 0.0)) throw InvalidArgument("scale factors must be > 0");
  std::vector<std::pair<double, double>> pts;  // (y, x) in target coordinates
  for (const auto& p : lane) {
    if (p.valid) pts.emplace_back(p.y * sy, p.x * sx);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> xs(rows.size(), 0.0);
  std::vector<bool> valid(rows.size(), false);
  if (!pts.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double r = rows[i];
      if (r < pts.front().first || r > pts.back().first) continue;
      const auto hi = std::lower_bound(pts.begin(), pts.end(), r,
                                       [](const auto& p, double y) { return p.first < y; });
      if (hi->first == r || hi == pts.begin()) {
        xs[i] = hi->second;
      } else {
        const auto lo = std::prev(hi);
        const double t = (r - lo->first) / (hi->first - lo->first);
        xs[i] = lo->second + t * (hi->second - lo->second);
      }
      valid[i] = true;
    }
  }
  return LanePolyline(rows, std::move(xs), std::move(valid));
}

AnnotationLane from_polyline(const LanePolyline& lane) {
  AnnotationLane out;
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (lane.valid[i]) out.push_back({lane.xs[i], static_cast<double>(lane.rows[i]), true});
  }
  return out;
}

std::string write_field_pgm(const Field2D& f, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw InvalidArgument("write_field_pgm: need finite lo < hi");
  const int w = f.shape().width();
  const int h = f.shape().height();
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * h);
  const double scale = 255.0 / (hi - lo);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double q = std::floor((f(x, y) - lo) * scale + 0.5);
      out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0))));
    }
  }
  return out;
}

PgmImage read_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) {
    skip();
    int v = 0;
    const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
    if (ec != std::errc() || v <= 0) throw ParseError(std::string("pgm: bad ") + what, 1);
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return v;
  };
  if (bytes.substr(0, 2) != "P5") throw ParseError("pgm: missing P5 magic", 1);
  pos = 2;
  PgmImage img;
  img.width = read_int("width");
  img.height = read_int("height");
  if (read_int("maxval") != 255) throw ParseError("pgm: maxval must be 255", 1);
  if (pos >= bytes.size() || !is_space(bytes[pos])) throw ParseError("pgm: truncated header", 1);
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - pos < n) throw ParseError("pgm: truncated pixel data", 1);
  img.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                    reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + n));
  return img;
}

std::string write_trace_csv(const EvolutionTrace& t) {
  std::string out = "step,energy,lane_error\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += std::to_string(t.steps[i]);
    out += ',';
    out += format_g17(t.energies[i]);
    out += ',';
    out += format_g17(t.lane_errors[i]);
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> parse_trace_csv(std::string_view text) {
  std::vector<TraceRow> rows;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "step,energy,lane_error") throw ParseError("unexpected trace header", 1);
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError("expected 3 columns", line_no);
    const auto step = parse_number(line.substr(0, c1));
    const auto energy = parse_number(line.substr(c1 + 1, c2 - c1 - 1));
    const auto err = parse_number(line.substr(c2 + 1));
    if (!step || !energy || !err) throw ParseError("bad number", line_no);
    rows.push_back({static_cast<int>(*step), *energy, *err});
  }
  return rows;
}

RunSummary summarize(const EvolutionTrace& t) {
  RunSummary s;
  if (t.size() > 0) {
    s.final_energy = t.energies.back();
    s.final_lane_error = t.lane_errors.back();
  }
  s.steps = t.steps_taken;
  s.converged = t.converged;
  return s;
}

nlohmann::ordered_json report_object(const DetectionMetrics& m) {
  nlohmann::ordered_json j;
  j["f1"] = m.f1;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  return j;
}

nlohmann::ordered_json report_object(const TuSimpleMetrics& m) {
  auto j = report_object(m.lanes);
  j["acc"] = m.acc;
  j["fp_rate"] = m.fp_rate;
  j["fn_rate"] = m.fn_rate;
  return j;
}

nlohmann::ordered_json report_object(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["final_energy"] = s.final_energy;
  j["final_lane_error"] = s.final_lane_error;
  j["steps"] = s.steps;
  j["converged"] = s.converged;
  return j;
}

std::string write_report_json(const nlohmann::ordered_json& report) { return report.dump() + "\n"; }

}  // namespace elasticlane

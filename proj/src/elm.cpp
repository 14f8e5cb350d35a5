#include "elasticlane/elm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

namespace elasticlane {

LanePolyline::LanePolyline(std::vector<int> r, std::vector<double> x, std::vector<bool> v)
    : rows(std::move(r)), xs(std::move(x)), valid(std::move(v)) {
  validate();
}

LanePolyline::LanePolyline(std::vector<int> r, std::vector<double> x)
    : rows(std::move(r)), xs(std::move(x)), valid(rows.size(), true) {
  validate();
}

LanePolyline LanePolyline::vertical(double x, int height) {
  std::vector<int> rows(static_cast<std::size_t>(std::max(height, 0)));
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> xs(rows.size(), x);
  return LanePolyline(std::move(rows), std::move(xs));
}

std::size_t LanePolyline::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

void LanePolyline::validate() const {
  if (xs.size() != rows.size() || valid.size() != rows.size()) {
    throw InvalidArgument("lane rows, xs and valid flags differ in length");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i] <= rows[i - 1]) throw InvalidArgument("lane rows are not strictly increasing");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (valid[i] && !std::isfinite(xs[i])) {
      throw InvalidArgument("lane has a non-finite x at row " + std::to_string(rows[i]));
    }
  }
}

HeavisideParams::HeavisideParams(double s) : sigma(s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("sigma must be positive");
}

double default_sigma_for_rows(int rows) noexcept { return rows == 18 ? 5.0 : 3.0; }

int ElmStack::count() const noexcept {
  return static_cast<int>(std::count(exists.begin(), exists.end(), true));
}

namespace {

struct Sample {
  int row;
  double x;
};

std::vector<Sample> valid_samples(const LanePolyline& lane, const GridShape& shape) {
  lane.validate();
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (!lane.valid[i]) continue;
    if (lane.rows[i] < 0 || lane.rows[i] >= shape.height()) {
      throw InvalidArgument("lane row " + std::to_string(lane.rows[i]) +
                            " lies outside the grid");
    }
    samples.push_back({lane.rows[i], lane.xs[i]});
  }
  if (samples.size() < 2) {
    throw DegenerateLane("lane has " + std::to_string(samples.size()) +
                         " valid rows, at least 2 are required");
  }
  return samples;
}

// x of the lane on every grid row, constant-extended from the nearest sample.
std::vector<double> row_positions(const std::vector<Sample>& samples, int height) {
  std::vector<double> xs(static_cast<std::size_t>(height));
  std::size_t next = 0;  // first sample with row >= r
  for (int r = 0; r < height; ++r) {
    while (next < samples.size() && samples[next].row < r) ++next;
    if (next < samples.size() && samples[next].row == r) {
      xs[r] = samples[next].x;
    } else if (next == 0) {
      xs[r] = samples.front().x;
    } else if (next == samples.size()) {
      xs[r] = samples.back().x;
    } else {
      const Sample& above = samples[next - 1];
      const Sample& below = samples[next];
      xs[r] = (r - above.row) <= (below.row - r) ? above.x : below.x;
    }
  }
  return xs;
}

}  // namespace

Field2D build_level_set(const LanePolyline& lane, const GridShape& shape) {
  const auto xs = row_positions(valid_samples(lane, shape), shape.height());
  Field2D phi(shape);
  for (int y = 0; y < shape.height(); ++y) {
    for (int x = 0; x < shape.width(); ++x) phi(x, y) = static_cast<double>(x) - xs[y];
  }
  return phi;
}

double heaviside(double phi, double sigma) noexcept {
  if (phi <= -sigma) return 0.0;
  if (phi >= sigma) return 1.0;
  return 0.5 * (1.0 + phi / sigma);
}

double heaviside_derivative(double phi, double sigma) noexcept {
  return std::abs(phi) < sigma ? 0.5 / sigma : 0.0;
}

Field2D smoothed_heaviside(const Field2D& phi, const HeavisideParams& p) {
  Field2D out(phi.shape());
  auto dst = out.values();
  const auto src = phi.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = heaviside(src[i], p.sigma);
  return out;
}

Field2D psi_from_level_set(const Field2D& phi, const HeavisideParams& p) {
  Field2D psi = smoothed_heaviside(phi, p);
  for (double& v : psi.values()) v -= 0.5;
  return psi;
}

EncodedLane encode_lane(const LanePolyline& lane, const GridShape& shape,
                        const HeavisideParams& p) {
  const auto samples = valid_samples(lane, shape);
  const auto xs = row_positions(samples, shape.height());

  Field2D psi(shape);
  for (int y = 0; y < shape.height(); ++y) {
    for (int x = 0; x < shape.width(); ++x) {
      psi(x, y) = heaviside(static_cast<double>(x) - xs[y], p.sigma) - 0.5;
    }
  }

  std::vector<bool> range(static_cast<std::size_t>(shape.height()), false);
  for (const Sample& s : samples) range[s.row] = true;

  std::vector<int> steep;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double slope = std::abs(samples[i].x - samples[i - 1].x) /
                         static_cast<double>(samples[i].row - samples[i - 1].row);
    if (slope > 2.0 * p.sigma) steep.push_back(samples[i - 1].row);
  }
  return {std::move(psi), RangeMask(std::move(range)), std::move(steep)};
}

LanePolyline decode_lane(const Field2D& psi, const RangeMask& mask) {
  const int w = psi.width();
  const int h = psi.height();
  if (static_cast<int>(mask.size()) != h) {
    throw ShapeMismatch("range mask length does not match field height");
  }

  LanePolyline lane;
  lane.rows.resize(h);
  std::iota(lane.rows.begin(), lane.rows.end(), 0);
  lane.xs.assign(h, 0.0);
  lane.valid.assign(h, false);

  struct Crossing {
    double x;
    double slope;
  };
  std::vector<Crossing> crossings;
  std::optional<double> previous;

  for (int y = h - 1; y >= 0; --y) {
    if (!mask[y]) continue;
    crossings.clear();
    for (int x = 0; x + 1 < w; ++x) {
      const double left = psi(x, y);
      const double right = psi(x + 1, y);
      if (left < 0.0 && right >= 0.0) {
        crossings.push_back({x + (-left) / (right - left), right - left});
      }
    }
    if (crossings.empty()) continue;

    auto best = crossings.begin();
    for (auto it = crossings.begin() + 1; it != crossings.end(); ++it) {
      const bool better = previous ? std::abs(it->x - *previous) < std::abs(best->x - *previous)
                                   : it->slope > best->slope;
      if (better) best = it;
    }
    lane.xs[y] = best->x;
    lane.valid[y] = true;
    previous = best->x;
  }
  return lane;
}

ElmStack order_and_pad(const std::vector<LanePolyline>& lanes, int capacity,
                       const GridShape& shape, const HeavisideParams& p) {
  if (capacity < 0) throw InvalidArgument("capacity must be nonnegative");
  if (static_cast<int>(lanes.size()) > capacity) {
    throw CapacityExceeded(std::to_string(lanes.size()) + " lanes exceed capacity " +
                           std::to_string(capacity));
  }

  struct Key {
    double bottom_x;
    double top_x;
    int index;
  };
  std::vector<Key> keys;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const auto samples = valid_samples(lanes[i], shape);
    keys.push_back({samples.back().x, samples.front().x, static_cast<int>(i)});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(a.bottom_x, a.top_x, a.index) < std::tie(b.bottom_x, b.top_x, b.index);
  });

  ElmStack stack;
  stack.capacity = capacity;
  for (const Key& key : keys) {
    EncodedLane enc = encode_lane(lanes[key.index], shape, p);
    stack.fields.push_back(std::move(enc.psi));
    stack.ranges.push_back(std::move(enc.range));
    stack.exists.push_back(true);
    stack.source_index.push_back(key.index);
  }
  while (static_cast<int>(stack.fields.size()) < capacity) {
    stack.fields.emplace_back(shape);
    stack.ranges.emplace_back(std::vector<bool>(shape.height(), false));
    stack.exists.push_back(false);
    stack.source_index.push_back(-1);
  }
  return stack;
}

LanePolyline filter_departure_points(const LanePolyline& lane, double threshold) {
  lane.validate();
  LanePolyline out = lane;
  std::optional<double> last_kept;
  for (std::size_t k = lane.size(); k-- > 0;) {
    if (!out.valid[k]) continue;
    if (last_kept && std::abs(out.xs[k] - *last_kept) > threshold) {
      out.valid[k] = false;
      continue;
    }
    last_kept = out.xs[k];
  }
  return out;
}

}  // namespace elasticlane

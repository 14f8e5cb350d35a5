#pragma once

// Shared fixtures for the test suites.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "elasticlane/elm.hpp"

namespace elasticlane::testing {

/// Smooth lane over all rows of a height-row grid: a sloped line plus one
/// sine bump, centred so it stays at least `margin` px inside the grid.
inline LanePolyline random_smooth_lane(std::mt19937_64& rng, int width, int height,
                                       double margin = 10.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double half_span = 0.5 * width - margin;
  const double amp = u(rng) * std::min(4.0, 0.25 * half_span);
  const double max_slope = std::min(0.6, (half_span - amp) / (0.5 * height));
  const double slope = (2.0 * u(rng) - 1.0) * max_slope;
  const double room = half_span - amp - std::abs(slope) * 0.5 * height;
  const double centre = 0.5 * width + (2.0 * u(rng) - 1.0) * std::max(room, 0.0);
  const double freq = 0.5 + u(rng) * 1.5;
  const double phase = u(rng) * 2.0 * std::numbers::pi;

  std::vector<int> rows(height);
  std::vector<double> xs(height);
  for (int r = 0; r < height; ++r) {
    const double t = static_cast<double>(r) / height;
    rows[r] = r;
    xs[r] = centre + slope * (r - 0.5 * height) +
            amp * std::sin(2.0 * std::numbers::pi * freq * t + phase);
  }
  return LanePolyline(std::move(rows), std::move(xs));
}

}  // namespace elasticlane::testing

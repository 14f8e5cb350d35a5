#include "elasticlane/assignment.hpp"

#include <algorithm>
#include <limits>

#include "elasticlane/error.hpp"

namespace elasticlane {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const int rows = static_cast<int>(weights.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(weights.front().size());
  for (const auto& row : weights) {
    if (static_cast<int>(row.size()) != cols) throw InvalidArgument("ragged weight matrix");
  }
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

  // Square cost matrix; padding cells carry zero weight.
  const int n = std::max(rows, cols);
  double max_weight = 0.0;
  for (const auto& row : weights) {
    for (double w : row) max_weight = std::max(max_weight, w);
  }
  auto cost = [&](int i, int j) {
    const double w = (i < rows && j < cols) ? weights[i][j] : 0.0;
    return max_weight - w;
  };

  // Potentials formulation, 1-based with a virtual column 0.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assigned(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match[j] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) assigned[i] = j - 1;
  }
  return assigned;
}

}  // namespace elasticlane

#pragma once

#include <vector>

namespace elasticlane {

/// Maximum-weight one-to-one assignment (Kuhn-Munkres) on a rectangular
/// weight matrix, rows x cols. Returns for each row the assigned column, or
/// -1 when the row is left unassigned (more rows than columns).
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace elasticlane

#pragma once

#include <vector>

#include "dynoclust/common.hpp"

namespace dynoclust {

// Exact minimum-cost perfect assignment on a square cost matrix via the
// Hungarian method with potentials, O(n^3). Returns the column assigned to
// each row.
std::vector<int> hungarian_min_assign(const Mat& cost);

}  // namespace dynoclust

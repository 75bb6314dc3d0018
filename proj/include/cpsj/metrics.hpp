#pragma once

#include "cpsj/core.hpp"

#include <vector>

namespace cpsj {

/// |output ∩ oracle| / |oracle|, or 1 when the oracle is empty.
/// Pairs are matched on (a, b) only.
double measure_recall(const std::vector<ResultPair>& output, const std::vector<ResultPair>& oracle);

}  // namespace cpsj

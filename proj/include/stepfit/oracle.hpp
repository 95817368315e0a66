#pragma once

#include <vector>

#include "stepfit/core.hpp"
#include "stepfit/solver.hpp"

namespace stepfit {

// Brute-force references. They share only pair_candidate with the fast
// solver, so optimal errors compare bit-exactly.

inline constexpr std::size_t kDefaultOracleCap = 512;

/// Dynamic program over prefixes with all O(n^2) interval errors precomputed.
StepFunction oracle_fit(const WeightedSeries& series, std::size_t b, std::size_t cap = kDefaultOracleCap);

/// Binary search over all pair candidates with a quadratic greedy monotone check.
StepFunction oracle_isotonic(const WeightedSeries& series, std::size_t b, std::size_t cap = kDefaultOracleCap);

CenterSet oracle_kcenter(std::vector<WeightedPoint> points, std::size_t k, std::size_t cap = kDefaultOracleCap);

/// Single-step error of [i, j] (0-based, inclusive) as the max over all pairs.
double brute_interval_error(const WeightedSeries& series, std::size_t i, std::size_t j);

}  // namespace stepfit

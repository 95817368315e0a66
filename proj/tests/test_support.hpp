#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stepfit/core.hpp"

namespace stepfit::gen {

/// y uniform in [0, 1), w log-uniform in [0.1, 10].
inline std::vector<WeightedPoint> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_real_distribution<double> exponent(-1.0, 1.0);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) {
    p.y = value(rng);
    p.w = std::pow(10.0, exponent(rng));
  }
  return pts;
}

/// Small integer values and weights, so ties and duplicates are common.
inline std::vector<WeightedPoint> random_tied_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> value(0, 6);
  std::uniform_int_distribution<int> weight(1, 4);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) {
    p.y = value(rng);
    p.w = weight(rng) * 0.5;
  }
  return pts;
}

inline std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace stepfit::gen

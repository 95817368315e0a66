#pragma once

#include <span>
#include <vector>

#include "stepfit/core.hpp"
#include "stepfit/tree.hpp"

namespace stepfit {

struct FitReport {
  StepFunction fit;
  SolverStats stats;
};

/// Optimal weighted L-infinity approximation with at most b steps. Steps
/// are the greedy leftmost-maximal partition at the optimal error; each step
/// value is that step's weighted L-infinity mean.
FitReport fit_steps_report(const WeightedSeries& series, std::size_t b);
StepFunction fit_steps(const WeightedSeries& series, std::size_t b);

/// Optimal nondecreasing b-step approximation. Each step takes the smallest
/// value admissible at the optimal error.
FitReport fit_isotonic_report(const WeightedSeries& series, std::size_t b);
StepFunction fit_isotonic(const WeightedSeries& series, std::size_t b);

struct CenterSet {
  std::vector<double> centers;  // ascending, distinct
  double radius = 0.0;
};

/// Weighted 1-D k-center: the step values of an optimal k-step fit of the
/// points sorted by value (ties by weight, heaviest first).
CenterSet k_center(std::vector<WeightedPoint> points, std::size_t k);

/// Sorted copy used by the k-center routines.
WeightedSeries sorted_for_kcenter(std::vector<WeightedPoint> points);

/// Weighted L-infinity mean of a point set and its error.
PairFit weighted_linf_mean(std::span<const WeightedPoint> points);

/// Values for a given partition: the per-step weighted L-infinity mean
/// (plain), or the smallest nondecreasing values admissible at eps (isotonic).
std::vector<double> step_values_from_partition(const WeightedSeries& series, const std::vector<Index>& breakpoints,
                                               Variant variant, double eps = 0.0);

}  // namespace stepfit

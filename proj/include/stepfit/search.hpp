#pragma once

#include <vector>

#include "stepfit/core.hpp"
#include "stepfit/envelope.hpp"
#include "stepfit/tree.hpp"

namespace stepfit {

// Search for the smallest feasible error among the entries of the implicit
// matrix E, where E(i, j) is the single-step error of [i, j] (0 if i > j).
// Rows are nondecreasing and columns nonincreasing, so every submatrix has
// its smallest entry in the lower left and its largest in the upper right.

/// Submatrix E(rows, cols) for two tree nodes. Either rows == cols (a
/// diagonal block) or rows lies left of cols; the gap envelopes describe the
/// points strictly between them and are empty when the gap is.
struct ActiveSubmatrix {
  NodeId rows = kNoNode;
  NodeId cols = kNoNode;
  BoundedEnvelope gap_up{Direction::up};
  BoundedEnvelope gap_down{Direction::down};

  bool diagonal() const noexcept { return rows == cols; }
};

/// Smallest and largest entry of one quadrant, clamped to the window as in
/// evaluate_interval_error. Entries with i > j are exactly 0.
struct QuadrantExtremes {
  NodeId rows = kNoNode;
  NodeId cols = kNoNode;
  double min_entry = 0.0;
  double max_entry = 0.0;
  bool below_diagonal = false;
};

/// Splits the submatrix (a leaf side stays whole) and evaluates each
/// quadrant's extreme entries. Counts evaluations in stats->entries_evaluated.
std::vector<QuadrantExtremes> quadrant_extremes(ActiveSubmatrix& sub, IntervalTree& tree,
                                                const ErrorWindow& window, SolverStats* stats = nullptr);

struct SearchState {
  std::vector<ActiveSubmatrix> active;
  /// Values of 1x1 submatrices held back for the final binary search.
  std::vector<double> singles;
  ErrorWindow window;
  int stage = 0;
  /// Joint errors of the gap envelopes, filtered lazily against the window.
  std::vector<double> gap_endpoint_errors;
};

/// Starts the search from the whole matrix.
SearchState initial_search_state(const IntervalTree& tree, const ErrorWindow& window);

/// One stage: quadrant extremes, tests at the medians of the minima and of
/// the maxima, elimination, gap extension, then two tests at medians of the
/// gap joint errors.
SearchState run_stage(SearchState state, IntervalTree& tree, std::size_t b, Variant variant, SolverStats& stats);

/// Binary search over the in-window entries; returns the final eps_high.
double final_binary_search(std::vector<double> entries, ErrorWindow& window, IntervalTree& tree, std::size_t b,
                           Variant variant, SolverStats& stats);

/// Runs all stages and the final binary search on a built tree. Returns the
/// minimum feasible error; `window` is left collapsed onto it.
double solve_min_error(IntervalTree& tree, ErrorWindow& window, std::size_t b, Variant variant, SolverStats& stats);

}  // namespace stepfit

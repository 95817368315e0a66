#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stepfit {

using Index = std::int32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised for malformed user input (empty series, bad weights, non-finite values).
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}

  /// 1-based position of the offending point, if the error is tied to one.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

/// Raised when a caller breaks an operation's precondition (e.g. querying
/// an envelope outside the live error window).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct WeightedPoint {
  double y = 0.0;
  double w = 1.0;
};

/// Validated, non-empty sequence of weighted points in independent-variable order.
class WeightedSeries {
 public:
  WeightedSeries() = default;

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const WeightedPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<WeightedPoint>& points() const noexcept { return points_; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

 private:
  friend WeightedSeries validate_series(const std::vector<std::pair<double, std::optional<double>>>&);
  friend WeightedSeries make_series(std::vector<WeightedPoint>);
  explicit WeightedSeries(std::vector<WeightedPoint> pts) : points_(std::move(pts)) {}

  std::vector<WeightedPoint> points_;
};

/// Validates raw (y, optional w) pairs; missing weights default to 1.
/// Throws ValidationError naming the first offending 1-based index.
WeightedSeries validate_series(const std::vector<std::pair<double, std::optional<double>>>& raw);

/// Same validation for already-paired points.
WeightedSeries make_series(std::vector<WeightedPoint> points);

/// Convenience: values with unit weights.
WeightedSeries make_series(const std::vector<double>& ys);
WeightedSeries make_series(const std::vector<double>& ys, const std::vector<double>& ws);

/// Minimal single-value weighted L-infinity error of two points and the value
/// attaining it. The error is computed by one fixed expression so equal
/// candidates compare bit-equal wherever they arise.
struct PairFit {
  double error = 0.0;
  double value = 0.0;
};

PairFit pairwise_error(const WeightedPoint& p, const WeightedPoint& q) noexcept;

/// Error of the pair alone: w_p w_q |y_q - y_p| / (w_p + w_q).
double pair_candidate(const WeightedPoint& p, const WeightedPoint& q) noexcept;

/// Live bracket (low, high] known to contain the optimal error.
struct ErrorWindow {
  double low = 0.0;
  double high = kInfinity;

  bool contains_open(double eps) const noexcept { return low < eps && eps < high; }
  bool contains(double eps) const noexcept { return low < eps && eps <= high; }
  bool operator==(const ErrorWindow&) const = default;
};

/// Records the outcome of a feasibility test at eps. Feasible tightens the
/// upper bound, infeasible raises the lower one. eps must lie in (low, high].
ErrorWindow window_update(const ErrorWindow& window, double eps, bool feasible);

struct StepFunction {
  /// 1-based step starts followed by n + 1.
  std::vector<Index> breakpoints;
  std::vector<double> values;
  double error = 0.0;

  std::size_t steps() const noexcept { return values.size(); }
};

/// Max over points of w_i |C_k - y_i| for the step each point belongs to.
double achieved_error(const WeightedSeries& series, const StepFunction& f);

struct SolverStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t max_nodes_per_test = 0;
  /// Largest per-test visit count among tests run on the completed tree.
  std::uint64_t max_nodes_per_complete_test = 0;
  /// Largest per-test visit count after subtracting the frontier length a
  /// construction-time test may walk sideways over (0 on the complete tree).
  std::uint64_t max_nodes_beyond_frontier = 0;
  std::uint64_t segments_created = 0;
  std::uint64_t segments_pruned = 0;
  std::uint64_t entries_evaluated = 0;
  std::uint64_t feasibility_tests = 0;
  std::uint64_t construction_tests = 0;
  std::uint64_t search_tests = 0;
  /// |R| left at the end of each tree height (index = height).
  std::vector<std::size_t> candidates_after_height;
  /// Active submatrices at the start of each search stage.
  std::vector<std::size_t> active_per_stage;

  void record_test(std::uint64_t visited, bool during_construction, bool on_complete_tree,
                   std::uint64_t frontier = 0);
};

}  // namespace stepfit

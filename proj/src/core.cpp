#include "stepfit/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace stepfit {

namespace {

void check_point(const WeightedPoint& p, std::size_t index) {
  if (!std::isfinite(p.y)) {
    throw ValidationError("value must be finite at index " + std::to_string(index), index);
  }
  if (std::isnan(p.w) || std::isinf(p.w)) {
    throw ValidationError("weight must be finite at index " + std::to_string(index), index);
  }
  if (!(p.w > 0.0)) {
    throw ValidationError("weight must be positive at index " + std::to_string(index), index);
  }
}

}  // namespace

WeightedSeries validate_series(const std::vector<std::pair<double, std::optional<double>>>& raw) {
  if (raw.empty()) throw ValidationError("empty input");
  std::vector<WeightedPoint> pts;
  pts.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    WeightedPoint p{raw[i].first, raw[i].second.value_or(1.0)};
    check_point(p, i + 1);
    pts.push_back(p);
  }
  return WeightedSeries(std::move(pts));
}

WeightedSeries make_series(std::vector<WeightedPoint> points) {
  if (points.empty()) throw ValidationError("empty input");
  for (std::size_t i = 0; i < points.size(); ++i) check_point(points[i], i + 1);
  return WeightedSeries(std::move(points));
}

WeightedSeries make_series(const std::vector<double>& ys) {
  std::vector<WeightedPoint> pts;
  pts.reserve(ys.size());
  for (double y : ys) pts.push_back({y, 1.0});
  return make_series(std::move(pts));
}

WeightedSeries make_series(const std::vector<double>& ys, const std::vector<double>& ws) {
  if (ys.size() != ws.size()) throw ValidationError("value and weight counts differ");
  std::vector<WeightedPoint> pts;
  pts.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) pts.push_back({ys[i], ws[i]});
  return make_series(std::move(pts));
}

double pair_candidate(const WeightedPoint& p, const WeightedPoint& q) noexcept {
  const WeightedPoint& lo = p.y <= q.y ? p : q;
  const WeightedPoint& hi = p.y <= q.y ? q : p;
  if (lo.y == hi.y) return 0.0;
  return lo.w * hi.w * (hi.y - lo.y) / (lo.w + hi.w);
}

PairFit pairwise_error(const WeightedPoint& p, const WeightedPoint& q) noexcept {
  const WeightedPoint& lo = p.y <= q.y ? p : q;
  const WeightedPoint& hi = p.y <= q.y ? q : p;
  if (lo.y == hi.y) return {0.0, lo.y};
  const double err = pair_candidate(p, q);
  // Clamp guards the last-bit overshoot of y + err / w.
  const double value = std::clamp(lo.y + err / lo.w, lo.y, hi.y);
  return {err, value};
}

ErrorWindow window_update(const ErrorWindow& window, double eps, bool feasible) {
  if (!window.contains(eps)) {
    throw ContractViolation("feasibility result outside the error window");
  }
  ErrorWindow next = window;
  if (feasible) {
    next.high = eps;
  } else {
    if (eps == window.high) throw ContractViolation("eps_high reported infeasible");
    next.low = eps;
  }
  return next;
}

double achieved_error(const WeightedSeries& series, const StepFunction& f) {
  double err = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    for (Index i = f.breakpoints[k]; i < f.breakpoints[k + 1]; ++i) {
      const auto& p = series[static_cast<std::size_t>(i - 1)];
      err = std::max(err, p.w * std::abs(f.values[k] - p.y));
    }
  }
  return err;
}

void SolverStats::record_test(std::uint64_t visited, bool during_construction, bool on_complete_tree,
                              std::uint64_t frontier) {
  ++feasibility_tests;
  nodes_visited += visited;
  max_nodes_per_test = std::max(max_nodes_per_test, visited);
  max_nodes_beyond_frontier = std::max(max_nodes_beyond_frontier, visited > frontier ? visited - frontier : 0);
  if (on_complete_tree) max_nodes_per_complete_test = std::max(max_nodes_per_complete_test, visited);
  if (during_construction) {
    ++construction_tests;
  } else {
    ++search_tests;
  }
}

}  // namespace stepfit

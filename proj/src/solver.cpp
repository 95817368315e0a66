#include "stepfit/solver.hpp"

#include <algorithm>

#include "stepfit/search.hpp"

namespace stepfit {

namespace {

void require_steps(std::size_t b) {
  if (b < 1) throw ValidationError("number of steps must be at least 1");
}

void check_breakpoints(const WeightedSeries& series, const std::vector<Index>& bp) {
  const auto n = static_cast<Index>(series.size());
  if (bp.size() < 2 || bp.front() != 1 || bp.back() != n + 1) throw ValidationError("invalid breakpoints");
  for (std::size_t k = 1; k < bp.size(); ++k) {
    if (bp[k] <= bp[k - 1]) throw ValidationError("invalid breakpoints");
  }
}

StepFunction run_length(const WeightedSeries& series) {
  StepFunction f;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i == 0 || series[i].y != series[i - 1].y) {
      f.breakpoints.push_back(static_cast<Index>(i + 1));
      f.values.push_back(series[i].y);
    }
  }
  f.breakpoints.push_back(static_cast<Index>(series.size() + 1));
  return f;
}

FitReport solve(const WeightedSeries& series, std::size_t b, Variant variant) {
  require_steps(b);
  FitReport report;
  const std::size_t n = series.size();
  if (variant == Variant::plain && b >= n) {
    for (std::size_t i = 0; i < n; ++i) {
      report.fit.breakpoints.push_back(static_cast<Index>(i + 1));
      report.fit.values.push_back(series[i].y);
    }
    report.fit.breakpoints.push_back(static_cast<Index>(n + 1));
    return report;
  }
  if (base_level_zero_test(series, b, variant)) {
    report.fit = run_length(series);
    return report;
  }

  BuildResult built = build_tree(series, b, variant);
  report.stats = std::move(built.stats);
  ErrorWindow window = built.window;
  const double eps = solve_min_error(built.tree, window, b, variant, report.stats);

  FeasibilityResult final_pass = built.tree.feasibility_test(eps, b, variant, window, &report.stats);
  report.stats.record_test(final_pass.nodes_visited, false, true);
  if (!final_pass.feasible) throw ContractViolation("optimal error failed its own feasibility pass");

  report.fit.breakpoints = std::move(final_pass.breakpoints);
  report.fit.values = step_values_from_partition(series, report.fit.breakpoints, variant, eps);
  report.fit.error = eps;
  return report;
}

}  // namespace

PairFit weighted_linf_mean(std::span<const WeightedPoint> points) {
  if (points.empty()) throw ContractViolation("mean of an empty set");
  auto bind = [&](double eps) {
    std::size_t d = 0, u = 0;
    double dv = points[0].y - eps / points[0].w;
    double uv = points[0].y + eps / points[0].w;
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double lo = points[i].y - eps / points[i].w;
      const double hi = points[i].y + eps / points[i].w;
      if (lo > dv) dv = lo, d = i;
      if (hi < uv) uv = hi, u = i;
    }
    return std::pair{d, u};
  };
  auto need = [&](std::pair<std::size_t, std::size_t> pr) {
    const auto& [d, u] = pr;
    return points[d].y <= points[u].y ? 0.0 : pair_candidate(points[d], points[u]);
  };
  double eps = 0.0;
  auto pr = bind(eps);
  double c = need(pr);
  if (c <= 0.0) return {0.0, points[pr.first].y};
  // Newton from below: each binding pair's crossing is a lower bound.
  for (;;) {
    eps = c;
    auto next = bind(eps);
    const double c2 = need(next);
    if (c2 <= eps) break;
    pr = next;
    c = c2;
  }
  PairFit fit = pairwise_error(points[pr.first], points[pr.second]);
  fit.error = c;
  return fit;
}

std::vector<double> step_values_from_partition(const WeightedSeries& series, const std::vector<Index>& breakpoints,
                                               Variant variant, double eps) {
  check_breakpoints(series, breakpoints);
  std::vector<double> values;
  values.reserve(breakpoints.size() - 1);
  const auto& pts = series.points();
  double prev = -kInfinity;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const auto first = static_cast<std::size_t>(breakpoints[k] - 1);
    const auto last = static_cast<std::size_t>(breakpoints[k + 1] - 1);
    if (variant == Variant::plain) {
      values.push_back(weighted_linf_mean(std::span(pts).subspan(first, last - first)).value);
    } else {
      double v = prev;
      for (std::size_t i = first; i < last; ++i) v = std::max(v, pts[i].y - eps / pts[i].w);
      values.push_back(v);
      prev = v;
    }
  }
  return values;
}

FitReport fit_steps_report(const WeightedSeries& series, std::size_t b) { return solve(series, b, Variant::plain); }

StepFunction fit_steps(const WeightedSeries& series, std::size_t b) { return fit_steps_report(series, b).fit; }

FitReport fit_isotonic_report(const WeightedSeries& series, std::size_t b) {
  return solve(series, b, Variant::isotonic);
}

StepFunction fit_isotonic(const WeightedSeries& series, std::size_t b) { return fit_isotonic_report(series, b).fit; }

WeightedSeries sorted_for_kcenter(std::vector<WeightedPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.w > b.w;
  });
  return make_series(std::move(points));
}

CenterSet k_center(std::vector<WeightedPoint> points, std::size_t k) {
  require_steps(k);
  const WeightedSeries sorted = sorted_for_kcenter(std::move(points));
  StepFunction f = fit_steps(sorted, k);
  CenterSet out;
  out.radius = f.error;
  out.centers = std::move(f.values);
  out.centers.erase(std::unique(out.centers.begin(), out.centers.end()), out.centers.end());
  return out;
}

}  // namespace stepfit

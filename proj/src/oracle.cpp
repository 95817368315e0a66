#include "stepfit/oracle.hpp"

#include <algorithm>
#include <limits>

namespace stepfit {

namespace {

void check_cap(const WeightedSeries& series, std::size_t cap) {
  if (series.size() > cap) {
    throw ValidationError("instance of size " + std::to_string(series.size()) + " exceeds oracle cap " +
                          std::to_string(cap));
  }
}

// err[i][j] for i <= j as the max pair candidate, built row by row.
std::vector<std::vector<double>> interval_errors(const WeightedSeries& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<double>> err(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double e = err[i][j - 1];
      for (std::size_t p = i; p < j; ++p) e = std::max(e, pair_candidate(s[p], s[j]));
      err[i][j] = e;
    }
  }
  return err;
}

// Mean of [i, j] from its worst pair.
double pair_mean(const WeightedSeries& s, std::size_t i, std::size_t j) {
  double best = -1.0;
  double value = s[i].y;
  for (std::size_t p = i; p <= j; ++p) {
    for (std::size_t q = p; q <= j; ++q) {
      const PairFit f = pairwise_error(s[p], s[q]);
      if (f.error > best) {
        best = f.error;
        value = f.value;
      }
    }
  }
  return value;
}

// Greedy nondecreasing steps at eps, deciding every constraint by its pair
// candidate. Returns breakpoints, or empty if infeasible.
std::vector<Index> isotonic_greedy(const WeightedSeries& s, std::size_t b, double eps) {
  const std::size_t n = s.size();
  // Lower bound from p meets upper bound from q iff y_p <= y_q or the pair
  // candidate is within eps.
  auto compatible = [&](std::size_t p, std::size_t q) { return s[p].y <= s[q].y || pair_candidate(s[p], s[q]) <= eps; };
  std::vector<Index> bp;
  std::size_t start = 0;
  while (start < n) {
    if (bp.size() == b) return {};
    for (std::size_t p = 0; p < start; ++p) {
      if (!compatible(p, start)) return {};
    }
    std::size_t j = start + 1;
    for (; j < n; ++j) {
      bool ok = true;
      for (std::size_t p = 0; p < j && ok; ++p) ok = compatible(p, j);
      for (std::size_t q = start; q < j && ok; ++q) ok = compatible(j, q);
      if (!ok) break;
    }
    bp.push_back(static_cast<Index>(start + 1));
    start = j;
  }
  bp.push_back(static_cast<Index>(n + 1));
  return bp;
}

}  // namespace

double brute_interval_error(const WeightedSeries& series, std::size_t i, std::size_t j) {
  double e = 0.0;
  for (std::size_t p = i; p <= j; ++p) {
    for (std::size_t q = p + 1; q <= j; ++q) e = std::max(e, pair_candidate(series[p], series[q]));
  }
  return e;
}

StepFunction oracle_fit(const WeightedSeries& series, std::size_t b, std::size_t cap) {
  check_cap(series, cap);
  if (b < 1) throw ValidationError("number of steps must be at least 1");
  const std::size_t n = series.size();
  const std::size_t steps = std::min(b, n);
  const auto err = interval_errors(series);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // best[k][j]: optimal error covering the first j points with k steps.
  std::vector<std::vector<double>> best(steps + 1, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> cut(steps + 1, std::vector<std::size_t>(n + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t j = k; j <= n; ++j) {
      for (std::size_t i = k - 1; i < j; ++i) {
        const double e = std::max(best[k - 1][i], err[i][j - 1]);
        if (e < best[k][j]) {
          best[k][j] = e;
          cut[k][j] = i;
        }
      }
    }
  }
  std::size_t k_best = 1;
  for (std::size_t k = 1; k <= steps; ++k) {
    if (best[k][n] < best[k_best][n]) k_best = k;
  }

  StepFunction f;
  f.error = best[k_best][n];
  std::vector<Index> starts;
  for (std::size_t k = k_best, j = n; k > 0; --k) {
    const std::size_t i = cut[k][j];
    starts.push_back(static_cast<Index>(i + 1));
    j = i;
  }
  std::reverse(starts.begin(), starts.end());
  f.breakpoints = starts;
  f.breakpoints.push_back(static_cast<Index>(n + 1));
  for (std::size_t k = 0; k + 1 < f.breakpoints.size(); ++k) {
    f.values.push_back(pair_mean(series, static_cast<std::size_t>(f.breakpoints[k] - 1),
                                 static_cast<std::size_t>(f.breakpoints[k + 1] - 2)));
  }
  return f;
}

StepFunction oracle_isotonic(const WeightedSeries& series, std::size_t b, std::size_t cap) {
  check_cap(series, cap);
  if (b < 1) throw ValidationError("number of steps must be at least 1");
  const std::size_t n = series.size();
  std::vector<double> candidates{0.0};
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) candidates.push_back(pair_candidate(series[p], series[q]));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // The largest candidate always works: it admits a single constant step.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (!isotonic_greedy(series, b, candidates[mid]).empty()) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  StepFunction f;
  f.error = candidates[lo];
  f.breakpoints = isotonic_greedy(series, b, f.error);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < f.breakpoints.size(); ++k) {
    double v = prev;
    for (auto i = static_cast<std::size_t>(f.breakpoints[k] - 1); i < static_cast<std::size_t>(f.breakpoints[k + 1] - 1);
         ++i) {
      v = std::max(v, series[i].y - f.error / series[i].w);
    }
    f.values.push_back(v);
    prev = v;
  }
  return f;
}

CenterSet oracle_kcenter(std::vector<WeightedPoint> points, std::size_t k, std::size_t cap) {
  const WeightedSeries sorted = sorted_for_kcenter(std::move(points));
  StepFunction f = oracle_fit(sorted, k, cap);
  CenterSet out;
  out.radius = f.error;
  out.centers = std::move(f.values);
  out.centers.erase(std::unique(out.centers.begin(), out.centers.end()), out.centers.end());
  return out;
}

}  // namespace stepfit

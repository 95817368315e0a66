#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>

#include "stepfit/envelope.hpp"
#include "stepfit/oracle.hpp"
#include "stepfit/solver.hpp"
#include "test_support.hpp"

using namespace stepfit;

namespace {

std::vector<double> pointwise(const StepFunction& f) {
  std::vector<double> out;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    for (Index i = f.breakpoints[k]; i < f.breakpoints[k + 1]; ++i) out.push_back(f.values[k]);
  }
  return out;
}

WeightedSeries random_series(std::mt19937_64& rng, std::size_t n, int t) {
  return make_series(t % 3 == 0 ? gen::random_tied_points(rng, n) : gen::random_points(rng, n));
}

// Can the given cut mask be given nondecreasing values at error eps? Step k
// takes the largest lower bound over steps 1..k, so every point so far must be
// compatible with every point of step k. Decided on pair errors only.
bool isotonic_partition_ok(const WeightedSeries& s, unsigned cuts, double eps) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool last = i + 1 == s.size() || ((cuts >> i) & 1u);
    if (!last) continue;
    for (std::size_t d = 0; d <= i; ++d) {
      for (std::size_t u = start; u <= i; ++u) {
        Ray down{s[d].y, s[d].w, Direction::down}, up{s[u].y, s[u].w, Direction::up};
        if (required_error(down, up) > eps) return false;
      }
    }
    start = i + 1;
  }
  return true;
}

double exhaustive_isotonic(const WeightedSeries& s, std::size_t b) {
  std::vector<double> cands{0.0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) cands.push_back(pair_candidate(s[i], s[j]));
  }
  std::sort(cands.begin(), cands.end());
  const unsigned masks = 1u << (s.size() - 1);
  for (double eps : cands) {
    for (unsigned m = 0; m < masks; ++m) {
      if (static_cast<std::size_t>(std::popcount(m)) + 1 > b) continue;
      if (isotonic_partition_ok(s, m, eps)) return eps;
    }
  }
  return kInfinity;
}

}  // namespace

TEST(FitSteps, Examples) {
  auto f = fit_steps(make_series({1, 3, 2, 9, 10}), 2);
  EXPECT_EQ(f.error, 1.0);
  EXPECT_EQ(f.breakpoints, (std::vector<Index>{1, 4, 6}));
  EXPECT_EQ(f.values, (std::vector<double>{2, 9.5}));

  auto g = fit_steps(make_series({0, 1}, {1, 3}), 1);
  EXPECT_EQ(g.error, 0.75);
  EXPECT_EQ(g.values, (std::vector<double>{0.75}));
  EXPECT_EQ(g.breakpoints, (std::vector<Index>{1, 3}));

  auto h = fit_steps(make_series({4, 1, 7}), 5);
  EXPECT_EQ(h.error, 0.0);
  EXPECT_EQ(pointwise(h), (std::vector<double>{4, 1, 7}));

  EXPECT_THROW(fit_steps(make_series({1, 2}), 0), ValidationError);
}

TEST(FitSteps, EqualValuesShortCircuit) {
  auto r = fit_steps_report(make_series({2, 2, 2, 2}), 1);
  EXPECT_EQ(r.fit.error, 0.0);
  EXPECT_EQ(r.fit.values, (std::vector<double>{2}));
  EXPECT_EQ(r.stats.feasibility_tests, 0u);
}

TEST(FitIsotonic, Examples) {
  auto a = fit_isotonic(make_series({5, 1}), 2);
  EXPECT_EQ(a.error, 2.0);
  EXPECT_EQ(pointwise(a), (std::vector<double>{3, 3}));

  auto b = fit_isotonic(make_series({1, 5}), 2);
  EXPECT_EQ(b.error, 0.0);
  EXPECT_EQ(pointwise(b), (std::vector<double>{1, 5}));

  auto c = fit_isotonic(make_series({1, 3, 2, 9, 10}), 2);
  EXPECT_EQ(c.error, 1.0);
  EXPECT_EQ(c.breakpoints, (std::vector<Index>{1, 4, 6}));
}

TEST(KCenter, Examples) {
  auto c = k_center({{0, 1}, {1, 1}, {2, 1}, {3, 1}}, 2);
  EXPECT_EQ(c.centers, (std::vector<double>{0.5, 2.5}));
  EXPECT_EQ(c.radius, 0.5);

  auto d = k_center({{3, 1}, {1, 1}, {3, 2}}, 4);
  EXPECT_EQ(d.centers, (std::vector<double>{1, 3}));
  EXPECT_EQ(d.radius, 0.0);

  auto e = k_center({{0, 1}, {1, 3}}, 1);
  EXPECT_EQ(e.centers, (std::vector<double>{0.75}));
  EXPECT_EQ(e.radius, 0.75);
}

TEST(StepValues, FromPartition) {
  auto s = make_series({1, 3, 2});
  EXPECT_EQ(step_values_from_partition(s, {1, 4}, Variant::plain), (std::vector<double>{2}));
  EXPECT_EQ(step_values_from_partition(make_series({9, 10}), {1, 3}, Variant::plain), (std::vector<double>{9.5}));
  EXPECT_EQ(step_values_from_partition(make_series({5, 1}), {1, 2, 3}, Variant::isotonic, 2.0),
            (std::vector<double>{3, 3}));
  EXPECT_THROW(step_values_from_partition(s, {1, 3}, Variant::plain), ValidationError);
  EXPECT_THROW(step_values_from_partition(s, {1, 2, 2, 4}, Variant::plain), ValidationError);
}

TEST(Oracle, SmallCases) {
  EXPECT_EQ(oracle_fit(make_series({1, 3, 2, 9, 10}), 2).error, 1.0);
  for (std::size_t b = 1; b <= 3; ++b) {
    EXPECT_EQ(oracle_fit(make_series(std::vector<double>{4}), b).error, 0.0);
    EXPECT_EQ(oracle_isotonic(make_series(std::vector<double>{4}), b).error, 0.0);
  }
  EXPECT_EQ(oracle_isotonic(make_series({5, 1}), 2).error, 2.0);
}

TEST(Solver, MatchesOracles) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 400; ++t) {
    std::size_t n = gen::uniform_size(rng, 1, 96);
    std::size_t b = gen::uniform_size(rng, 1, n);
    auto s = random_series(rng, n, t);
    auto f = fit_steps(s, b);
    auto o = oracle_fit(s, b);
    ASSERT_EQ(f.error, o.error) << "n=" << n << " b=" << b;
    EXPECT_LE(f.steps(), b);
    EXPECT_LE(achieved_error(s, f), f.error * (1 + 1e-12));
    auto g = fit_isotonic(s, b);
    auto oi = oracle_isotonic(s, b);
    ASSERT_EQ(g.error, oi.error) << "n=" << n << " b=" << b;
    EXPECT_LE(achieved_error(s, g), g.error * (1 + 1e-12));
    EXPECT_TRUE(std::is_sorted(g.values.begin(), g.values.end()));
    EXPECT_LE(f.error, g.error);
  }
}

TEST(Solver, IsotonicMatchesExhaustive) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 400; ++t) {
    std::size_t n = gen::uniform_size(rng, 1, 9);
    std::size_t b = gen::uniform_size(rng, 1, std::min<std::size_t>(n, 4));
    auto s = random_series(rng, n, t);
    EXPECT_EQ(fit_isotonic(s, b).error, exhaustive_isotonic(s, b)) << "n=" << n << " b=" << b;
  }
}

TEST(Solver, ScaleAndDuplicateInvariance) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = gen::uniform_size(rng, 2, 80);
    std::size_t b = gen::uniform_size(rng, 1, std::min<std::size_t>(n, 10));
    auto pts = t % 2 ? gen::random_points(rng, n) : gen::random_tied_points(rng, n);
    double e = fit_steps(make_series(pts), b).error;

    auto scaled = pts;
    for (auto& p : scaled) p.y *= 4;
    EXPECT_EQ(fit_steps(make_series(scaled), b).error, 4 * e);

    auto shifted = pts;
    for (auto& p : shifted) p.y += 3;
    EXPECT_NEAR(fit_steps(make_series(shifted), b).error, e, 1e-12 * (1 + e) * 8);

    auto dup = pts;
    std::size_t at = gen::uniform_size(rng, 0, n - 1);
    dup.insert(dup.begin() + static_cast<std::ptrdiff_t>(at), pts[at]);
    EXPECT_EQ(fit_steps(make_series(dup), b).error, e);
  }
}

TEST(KCenter, PermutationInvariantAndMatchesOracle) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = gen::uniform_size(rng, 1, 40);
    std::size_t k = gen::uniform_size(rng, 1, 6);
    auto pts = t % 2 ? gen::random_points(rng, n) : gen::random_tied_points(rng, n);
    auto c = k_center(pts, k);
    std::shuffle(pts.begin(), pts.end(), rng);
    auto d = k_center(pts, k);
    EXPECT_EQ(c.radius, d.radius);
    EXPECT_EQ(c.radius, oracle_kcenter(pts, k).radius);
    EXPECT_LE(c.centers.size(), k);
    EXPECT_TRUE(std::is_sorted(c.centers.begin(), c.centers.end()));
    for (const auto& p : pts) {
      double best = kInfinity;
      for (double z : c.centers) best = std::min(best, p.w * std::abs(p.y - z));
      EXPECT_LE(best, c.radius * (1 + 1e-12) + 1e-300);
    }
  }
}

TEST(WeightedMean, PairRule) {
  std::vector<WeightedPoint> pts{{0, 1}, {2, 3}, {1, 1}};
  auto m = weighted_linf_mean(pts);
  EXPECT_EQ(m.error, 1.5);
  EXPECT_EQ(m.value, 1.5);
}

#pragma once

#include <span>
#include <vector>

#include "stepfit/core.hpp"

namespace stepfit {

// Error envelopes in the error coordinate. For a point (y, w) the upward ray
// gives the largest admissible value y + eps / w at error eps, the downward
// ray the smallest admissible value y - eps / w. An upward envelope is the
// pointwise minimum of its rays (U^-1), a downward one the pointwise maximum
// (D^-1). A set of points admits one value with error <= eps iff
// D^-1(eps) <= U^-1(eps).

enum class Direction { up, down };

struct Ray {
  double origin = 0.0;  // y: the value with zero error
  double slope = 1.0;   // w
  Direction direction = Direction::up;
  Index point = -1;     // 0-based index into the series, -1 if unknown

  double value_at(double eps) const noexcept {
    return direction == Direction::up ? origin + eps / slope : origin - eps / slope;
  }
  WeightedPoint weighted_point() const noexcept { return {origin, slope}; }
};

/// A ray together with the error range [err_lo, err_hi] on which it is the
/// envelope's active piece.
struct Segment {
  Ray ray;
  double err_lo = 0.0;
  double err_hi = kInfinity;
};

/// The ray attaining an envelope's inverse at some error, and its value there.
struct Hit {
  double value = 0.0;
  Ray ray;
};

/// Smallest error at which the lower bound from `down` and the upper bound
/// from `up` are compatible (0 if they always are). Uses pair_candidate.
double required_error(const Ray& down, const Ray& up) noexcept;

/// Envelope segments ordered by error, restricted to the ones whose error
/// range meets the live window. Pruning only ever drops segments from the
/// two ends.
class BoundedEnvelope {
 public:
  BoundedEnvelope() = default;
  explicit BoundedEnvelope(Direction direction) : direction_(direction) {}

  /// Builds from already-ordered segments (used by merge and by tests).
  BoundedEnvelope(Direction direction, std::vector<Segment> segments);

  static BoundedEnvelope leaf(const WeightedPoint& p, Index point, Direction direction);

  Direction direction() const noexcept { return direction_; }
  bool empty() const noexcept { return first_ == segs_.size(); }
  std::size_t size() const noexcept { return segs_.size() - first_ - trailing_; }
  std::span<const Segment> segments() const noexcept {
    return std::span<const Segment>(segs_).subspan(first_, size());
  }

  /// Drops segments with no error inside the open window. At least one
  /// segment always remains. Returns the number removed.
  std::size_t prune(const ErrorWindow& window);

  /// Inverse at eps: U^-1 for up envelopes, D^-1 for down ones. eps must lie
  /// in [low, high] of the window; inessential end segments are pruned first.
  Hit locate(double eps, const ErrorWindow& window, SolverStats* stats = nullptr);

 private:
  Direction direction_ = Direction::up;
  std::vector<Segment> segs_;
  std::size_t first_ = 0;
  std::size_t trailing_ = 0;
};

/// Public inverse query; eps must lie in (low, high].
double inverse_query(BoundedEnvelope& env, double eps, const ErrorWindow& window,
                     SolverStats* stats = nullptr);

struct MergeResult {
  BoundedEnvelope merged;
  /// Joint errors of `merged` strictly inside the window.
  std::vector<double> endpoint_errors;
};

/// Pointwise combination of two same-direction envelopes restricted to the
/// window. Equal rays keep the one from `a`.
MergeResult merge_envelopes(BoundedEnvelope& a, BoundedEnvelope& b, const ErrorWindow& window,
                            SolverStats* stats = nullptr);

/// Folds merge_envelopes over several envelopes; empty inputs are skipped.
MergeResult merge_all(std::span<BoundedEnvelope* const> parts, Direction direction,
                      const ErrorWindow& window, SolverStats* stats = nullptr);

/// Single-step error of the union of the pieces, clamped to the window:
/// exact if it lies in (low, high), low - 1 if it is <= low, high + 1 if it
/// is >= high. The exact value is always a pair_candidate of two input points.
double evaluate_interval_error(std::span<BoundedEnvelope* const> up_pieces,
                               std::span<BoundedEnvelope* const> down_pieces,
                               const ErrorWindow& window, SolverStats* stats = nullptr);

}  // namespace stepfit

#include "stepfit/envelope.hpp"

#include <algorithm>
#include <utility>

namespace stepfit {

namespace {

// Rays of one direction are handled as lines key(eps) = s*y + eps/w whose
// lower envelope is wanted, s = +1 for up and -1 for down. In error order the
// active lines have strictly increasing w.
double key_origin(const Ray& r) noexcept {
  return r.direction == Direction::up ? r.origin : -r.origin;
}

// Error at which `b` (larger w) takes over from `a`.
double joint_error(const Ray& a, const Ray& b) noexcept {
  return (key_origin(b) - key_origin(a)) * (a.slope * b.slope / (b.slope - a.slope));
}

// Lower envelope of lines sorted by slope ascending, ties ordered by
// preference. Writes rays and their joints into the scratch buffers.
void lower_hull(const std::vector<Ray>& rays, std::vector<Ray>& stack, std::vector<double>& joints) {
  stack.clear();
  joints.clear();  // joints[k] = joint of stack[k-1], stack[k]
  for (const Ray& r : rays) {
    if (!stack.empty() && stack.back().slope == r.slope) {
      if (key_origin(r) < key_origin(stack.back())) {
        stack.pop_back();
        joints.pop_back();
      } else {
        continue;
      }
    }
    double j = -kInfinity;
    while (!stack.empty()) {
      j = joint_error(stack.back(), r);
      if (stack.size() >= 2 && j <= joints.back()) {
        stack.pop_back();
        joints.pop_back();
        continue;
      }
      break;
    }
    if (stack.empty()) j = -kInfinity;
    stack.push_back(r);
    joints.push_back(j);
  }
}

struct MergeScratch {
  std::vector<Ray> rays;
  std::vector<Ray> stack;
  std::vector<double> joints;
};

MergeScratch& scratch() {
  thread_local MergeScratch s;
  return s;
}

bool essential(const Segment& s, const ErrorWindow& w) noexcept {
  return s.err_hi > w.low && s.err_lo < w.high;
}

}  // namespace

double required_error(const Ray& down, const Ray& up) noexcept {
  if (down.origin <= up.origin) return 0.0;
  return pair_candidate(down.weighted_point(), up.weighted_point());
}

BoundedEnvelope::BoundedEnvelope(Direction direction, std::vector<Segment> segments)
    : direction_(direction), segs_(std::move(segments)) {}

BoundedEnvelope BoundedEnvelope::leaf(const WeightedPoint& p, Index point, Direction direction) {
  return BoundedEnvelope(direction, {Segment{Ray{p.y, p.w, direction, point}, 0.0, kInfinity}});
}

std::size_t BoundedEnvelope::prune(const ErrorWindow& window) {
  std::size_t removed = 0;
  while (size() > 1 && !essential(segs_[first_], window)) {
    ++first_;
    ++removed;
  }
  while (size() > 1 && !essential(segs_[segs_.size() - 1 - trailing_], window)) {
    ++trailing_;
    ++removed;
  }
  return removed;
}

Hit BoundedEnvelope::locate(double eps, const ErrorWindow& window, SolverStats* stats) {
  if (empty()) throw ContractViolation("query on an empty envelope");
  const std::size_t removed = prune(window);
  if (stats) stats->segments_pruned += removed;
  // Alternate from both ends towards the segment containing eps.
  std::size_t front = first_;
  std::size_t back = segs_.size() - 1 - trailing_;
  const Segment* hit = nullptr;
  while (front <= back) {
    if (eps <= segs_[front].err_hi) {
      hit = &segs_[front];
      break;
    }
    if (segs_[back].err_lo <= eps) {
      hit = &segs_[back];
      break;
    }
    ++front;
    --back;
  }
  if (!hit) hit = &segs_[first_];
  return {hit->ray.value_at(eps), hit->ray};
}

double inverse_query(BoundedEnvelope& env, double eps, const ErrorWindow& window, SolverStats* stats) {
  if (!window.contains(eps)) throw ContractViolation("inverse query outside the error window");
  return env.locate(eps, window, stats).value;
}

MergeResult merge_envelopes(BoundedEnvelope& a, BoundedEnvelope& b, const ErrorWindow& window,
                            SolverStats* stats) {
  if (a.direction() != b.direction()) throw ContractViolation("merging envelopes of different directions");
  const std::size_t removed = a.prune(window) + b.prune(window);
  if (stats) stats->segments_pruned += removed;

  MergeScratch& buf = scratch();
  std::vector<Ray>& rays = buf.rays;
  rays.clear();
  auto sa = a.segments();
  auto sb = b.segments();
  std::size_t i = 0, j = 0;
  while (i < sa.size() || j < sb.size()) {
    if (j == sb.size() || (i < sa.size() && sa[i].ray.slope <= sb[j].ray.slope)) {
      rays.push_back(sa[i++].ray);
    } else {
      rays.push_back(sb[j++].ray);
    }
  }

  lower_hull(rays, buf.stack, buf.joints);
  const std::vector<Ray>& hull = buf.stack;
  auto segment_at = [&](std::size_t k) {
    const double lo = k == 0 ? 0.0 : buf.joints[k];
    const double hi = k + 1 < hull.size() ? buf.joints[k + 1] : kInfinity;
    return Segment{hull[k], lo, hi};
  };
  std::vector<Segment> kept;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const Segment s = segment_at(k);
    if (essential(s, window)) {
      if (kept.empty()) kept.reserve(hull.size() - k);
      kept.push_back(s);
    }
  }
  if (kept.empty()) {
    // Only possible for a degenerate window; keep the segment holding low.
    for (std::size_t k = 0; k < hull.size(); ++k) {
      const Segment s = segment_at(k);
      if (s.err_lo <= window.low && window.low <= s.err_hi) {
        kept.push_back(s);
        break;
      }
    }
  }

  MergeResult result;
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    if (window.contains_open(kept[k].err_hi)) result.endpoint_errors.push_back(kept[k].err_hi);
  }
  if (stats) stats->segments_created += kept.size();
  result.merged = BoundedEnvelope(a.direction(), std::move(kept));
  return result;
}

MergeResult merge_all(std::span<BoundedEnvelope* const> parts, Direction direction,
                      const ErrorWindow& window, SolverStats* stats) {
  MergeResult acc{BoundedEnvelope(direction), {}};
  bool have = false;
  for (BoundedEnvelope* part : parts) {
    if (part == nullptr || part->empty()) continue;
    if (part->direction() != direction) throw ContractViolation("merging envelopes of different directions");
    if (!have) {
      const std::size_t removed = part->prune(window);
      if (stats) {
        stats->segments_pruned += removed;
        stats->segments_created += part->size();
      }
      acc.merged = *part;
      have = true;
      continue;
    }
    MergeResult next = merge_envelopes(acc.merged, *part, window, stats);
    acc.merged = std::move(next.merged);
  }
  // Report joints of the final envelope only; intermediate ones are gone.
  auto segs = acc.merged.segments();
  for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
    if (window.contains_open(segs[k].err_hi)) acc.endpoint_errors.push_back(segs[k].err_hi);
  }
  return acc;
}

double evaluate_interval_error(std::span<BoundedEnvelope* const> up_pieces,
                               std::span<BoundedEnvelope* const> down_pieces,
                               const ErrorWindow& window, SolverStats* stats) {
  auto bind = [&](double eps) {
    bool have_up = false, have_down = false;
    Hit up, down;
    for (BoundedEnvelope* env : up_pieces) {
      if (env == nullptr || env->empty()) continue;
      Hit h = env->locate(eps, window, stats);
      if (!have_up || h.value < up.value) up = h;
      have_up = true;
    }
    for (BoundedEnvelope* env : down_pieces) {
      if (env == nullptr || env->empty()) continue;
      Hit h = env->locate(eps, window, stats);
      if (!have_down || h.value > down.value) down = h;
      have_down = true;
    }
    if (!have_up || !have_down) throw ContractViolation("interval error of an empty piece list");
    return required_error(down.ray, up.ray);
  };

  // Newton iteration from below: the binding pair at eps gives a candidate
  // c <= true error; if eps is already feasible we are done.
  double eps = window.low;
  bool first = true;
  for (;;) {
    const double c = bind(eps);
    if (c <= eps) return first ? window.low - 1.0 : eps;
    if (c >= window.high) return window.high + 1.0;
    eps = c;
    first = false;
  }
}

}  // namespace stepfit

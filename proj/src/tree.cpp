#include "stepfit/tree.hpp"

#include <algorithm>
#include <functional>

namespace stepfit {

namespace {

void decompose_into(Index lo, Index hi, Index i, Index j, std::vector<IndexRange>& out) {
  if (j < lo || hi < i) return;
  if (i <= lo && hi <= j) {
    out.push_back({lo, hi});
    return;
  }
  const Index mid = lo + (hi - lo + 2) / 2 - 1;  // left part has ceil(size/2)
  decompose_into(lo, mid, i, j, out);
  decompose_into(mid + 1, hi, i, j, out);
}

// Running extremes of the step being grown: the largest lower bound D^-1
// and the smallest upper bound U^-1, with the rays attaining them.
struct StepAccumulator {
  bool has_down = false;
  bool has_up = false;
  Hit down;
  Hit up;
};

}  // namespace

std::vector<IndexRange> decompose(Index i, Index j, Index n) {
  if (n < 1 || i < 1 || j > n || i > j) throw ContractViolation("decompose: indices out of range");
  std::vector<IndexRange> out;
  decompose_into(1, n, i, j, out);
  return out;
}

bool base_level_zero_test(const WeightedSeries& series, std::size_t b, Variant variant) {
  std::size_t runs = 1;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].y == series[i - 1].y) continue;
    if (variant == Variant::isotonic && series[i].y < series[i - 1].y) return false;
    if (++runs > b) return false;
  }
  return runs <= b;
}

IntervalTree::IntervalTree(const WeightedSeries& series) : points_(series) {
  if (series.empty()) throw ContractViolation("tree over an empty series");
  const auto n = static_cast<Index>(series.size());
  nodes_.reserve(2 * series.size());
  leaf_of_.assign(series.size(), kNoNode);
  build_shape(0, n - 1, kNoNode, 0);
  by_height_.assign(static_cast<std::size_t>(height()) + 1, {});
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    by_height_[static_cast<std::size_t>(nodes_[id].height)].push_back(static_cast<NodeId>(id));
  }
  for (Index i = 0; i < n; ++i) {
    Node& leaf = node(leaf_of_[static_cast<std::size_t>(i)]);
    leaf.up = BoundedEnvelope::leaf(series[static_cast<std::size_t>(i)], i, Direction::up);
    leaf.down = BoundedEnvelope::leaf(series[static_cast<std::size_t>(i)], i, Direction::down);
  }
  sideways_next_.assign(nodes_.size(), kNoNode);
  set_built_height(0);
}

NodeId IntervalTree::build_shape(Index lo, Index hi, NodeId parent, int depth) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_.back().lo = lo;
  nodes_.back().hi = hi;
  nodes_.back().parent = parent;
  nodes_.back().depth = depth;
  if (lo == hi) {
    leaf_of_[static_cast<std::size_t>(lo)] = id;
    return id;
  }
  const Index mid = lo + (hi - lo + 2) / 2 - 1;
  const NodeId l = build_shape(lo, mid, id, depth + 1);
  const NodeId r = build_shape(mid + 1, hi, id, depth + 1);
  Node& self = node(id);
  self.left = l;
  self.right = r;
  self.height = 1 + std::max(node(l).height, node(r).height);
  return id;
}

bool IntervalTree::parent_available(NodeId id) const noexcept {
  const NodeId p = node(id).parent;
  return p != kNoNode && node(p).height <= built_height_;
}

void IntervalTree::set_built_height(int h) {
  built_height_ = h;
  frontier_size_ = 0;
  NodeId prev = kNoNode;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    if (node(id).height <= h) {
      if (prev != kNoNode) sideways_next_[static_cast<std::size_t>(prev)] = id;
      sideways_next_[static_cast<std::size_t>(id)] = kNoNode;
      prev = id;
      ++frontier_size_;
      return;
    }
    walk(node(id).left);
    walk(node(id).right);
  };
  walk(root());
}

FeasibilityResult IntervalTree::feasibility_test(double eps, std::size_t b, Variant variant,
                                                 const ErrorWindow& window, SolverStats* stats) {
  if (!window.contains(eps)) throw ContractViolation("feasibility test outside the error window");
  const auto n = static_cast<Index>(size());
  FeasibilityResult res;
  std::uint64_t visited = 0;

  auto absorb = [&](StepAccumulator& acc, NodeId id) {
    Node& nd = node(id);
    const Hit d = nd.down.locate(eps, window, stats);
    const Hit u = nd.up.locate(eps, window, stats);
    const Hit& nd_down = (acc.has_down && acc.down.value >= d.value) ? acc.down : d;
    const Hit& nd_up = (acc.has_up && acc.up.value <= u.value) ? acc.up : u;
    if (required_error(nd_down.ray, nd_up.ray) > eps) return false;
    acc.down = nd_down;
    acc.up = nd_up;
    acc.has_down = acc.has_up = true;
    return true;
  };

  StepAccumulator prev;
  Index start = 0;
  bool feasible = true;
  while (start < n) {
    if (res.value_intervals.size() == b) {
      feasible = false;
      break;
    }
    StepAccumulator acc;
    if (variant == Variant::isotonic && prev.has_down) {
      acc.down = prev.down;
      acc.has_down = true;
    }
    NodeId cur = leaf(start);
    ++visited;
    if (!absorb(acc, cur)) {  // only the isotonic carry-over can block a singleton
      feasible = false;
      break;
    }

    Index end = n - 1;
    NodeId blocked = kNoNode;
    for (;;) {
      const Node& c = node(cur);
      if (c.hi == n - 1) break;
      if (parent_available(cur)) {
        const NodeId p = c.parent;
        if (node(p).left == cur) {
          const NodeId sib = node(p).right;
          ++visited;
          if (!absorb(acc, sib)) {
            blocked = sib;
            break;
          }
        }
        ++visited;
        cur = p;
        continue;
      }
      // Frontier during construction: move sideways.
      const NodeId next = sideways_next_[static_cast<std::size_t>(cur)];
      ++visited;
      if (!absorb(acc, next)) {
        blocked = next;
        break;
      }
      cur = next;
    }
    if (blocked != kNoNode) {
      // `blocked` never fits whole; find its first point that does not fit.
      NodeId x = blocked;
      while (!node(x).is_leaf()) {
        const NodeId l = node(x).left;
        ++visited;
        x = absorb(acc, l) ? node(x).right : l;
      }
      end = node(x).lo - 1;
    }

    res.breakpoints.push_back(start + 1);
    res.value_intervals.emplace_back(acc.down.value, acc.up.value);
    if (variant == Variant::isotonic) res.committed_values.push_back(acc.down.value);
    prev = acc;
    start = end + 1;
  }
  res.feasible = feasible;
  if (feasible) {
    res.breakpoints.push_back(n + 1);
  } else {
    res.breakpoints.clear();
  }
  res.nodes_visited = visited;
  return res;
}

void IntervalTree::prune_all(const ErrorWindow& window, SolverStats* stats) {
  std::uint64_t removed = 0;
  for (Node& nd : nodes_) removed += nd.up.prune(window) + nd.down.prune(window);
  if (stats) stats->segments_pruned += removed;
}

FeasibilityResult feasibility_test(IntervalTree& tree, double eps, std::size_t b, Variant variant,
                                   const ErrorWindow& window, SolverStats* stats) {
  return tree.feasibility_test(eps, b, variant, window, stats);
}

ErrorWindow test_and_update(IntervalTree& tree, double eps, std::size_t b, Variant variant,
                            const ErrorWindow& window, SolverStats& stats, bool during_construction) {
  const FeasibilityResult res = tree.feasibility_test(eps, b, variant, window, &stats);
  stats.record_test(res.nodes_visited, during_construction, tree.complete(), tree.complete() ? 0 : tree.frontier_size());
  return window_update(window, eps, res.feasible);
}

std::optional<double> lower_median_in_window(std::vector<double>& candidates, const ErrorWindow& window) {
  std::erase_if(candidates, [&](double e) { return !window.contains_open(e); });
  if (candidates.empty()) return std::nullopt;
  const auto mid = candidates.begin() + static_cast<std::ptrdiff_t>((candidates.size() - 1) / 2);
  std::nth_element(candidates.begin(), mid, candidates.end());
  return *mid;
}

BuildResult build_tree(const WeightedSeries& series, std::size_t b, Variant variant) {
  BuildResult out{IntervalTree(series), ErrorWindow{}, SolverStats{}};
  IntervalTree& tree = out.tree;
  SolverStats& stats = out.stats;
  ErrorWindow& window = out.window;
  stats.segments_created += 2 * series.size();
  stats.candidates_after_height.push_back(0);

  std::vector<double> pending;  // joint errors still inside the window
  auto median_test = [&] {
    const auto med = lower_median_in_window(pending, window);
    if (!med) return false;
    window = test_and_update(tree, *med, b, variant, window, stats, true);
    return true;
  };

  for (int h = 1; h <= tree.height(); ++h) {
    for (NodeId id : tree.nodes_at_height(h)) {
      auto& nd = tree.node(id);
      auto& l = tree.node(nd.left);
      auto& r = tree.node(nd.right);
      MergeResult up = merge_envelopes(l.up, r.up, window, &stats);
      MergeResult down = merge_envelopes(l.down, r.down, window, &stats);
      nd.up = std::move(up.merged);
      nd.down = std::move(down.merged);
      pending.insert(pending.end(), up.endpoint_errors.begin(), up.endpoint_errors.end());
      pending.insert(pending.end(), down.endpoint_errors.begin(), down.endpoint_errors.end());
    }
    tree.set_built_height(h);
    for (int t = 0; t < 3; ++t) {
      if (!median_test()) break;
    }
    std::erase_if(pending, [&](double e) { return !window.contains_open(e); });
    stats.candidates_after_height.push_back(pending.size());
  }
  while (median_test()) {
  }
  tree.prune_all(window, &stats);
  return out;
}

}  // namespace stepfit

#include "stepfit/search.hpp"

#include <algorithm>
#include <array>

namespace stepfit {

namespace {

// A node's two children, or the node itself if it is a leaf.
struct Halves {
  std::array<NodeId, 2> ids{kNoNode, kNoNode};
  std::size_t count = 0;

  const NodeId* begin() const noexcept { return ids.data(); }
  const NodeId* end() const noexcept { return ids.data() + count; }
  std::size_t size() const noexcept { return count; }
  const NodeId* data() const noexcept { return ids.data(); }
  const NodeId& operator[](std::size_t i) const noexcept { return ids[i]; }
};

Halves halves(const IntervalTree& tree, NodeId id) {
  const auto& nd = tree.node(id);
  if (nd.is_leaf()) return {{id, kNoNode}, 1};
  return {{nd.left, nd.right}, 2};
}

class EntryEvaluator {
 public:
  EntryEvaluator(IntervalTree& tree, ActiveSubmatrix& sub, const ErrorWindow& window, SolverStats* stats)
      : tree_(tree), sub_(sub), window_(window), stats_(stats) {}

  // Error of the union of the given nodes plus (optionally) the gap.
  double operator()(std::initializer_list<std::span<const NodeId>> groups, bool with_gap) {
    std::size_t count = 0;
    for (auto group : groups) {
      for (NodeId id : group) {
        auto& nd = tree_.node(id);
        up_[count] = &nd.up;
        down_[count] = &nd.down;
        ++count;
      }
    }
    if (with_gap && !sub_.gap_up.empty()) {
      up_[count] = &sub_.gap_up;
      down_[count] = &sub_.gap_down;
      ++count;
    }
    if (stats_) ++stats_->entries_evaluated;
    return evaluate_interval_error(std::span(up_.data(), count), std::span(down_.data(), count), window_, stats_);
  }

 private:
  IntervalTree& tree_;
  ActiveSubmatrix& sub_;
  const ErrorWindow& window_;
  SolverStats* stats_;
  // At most: row node, rest of rows, gap, columns before, column node.
  std::array<BoundedEnvelope*, 5> up_{};
  std::array<BoundedEnvelope*, 5> down_{};
};

}  // namespace

std::vector<QuadrantExtremes> quadrant_extremes(ActiveSubmatrix& sub, IntervalTree& tree, const ErrorWindow& window,
                                                SolverStats* stats) {
  EntryEvaluator eval(tree, sub, window, stats);
  const double below = window.low - 1.0;
  std::vector<QuadrantExtremes> out;

  if (sub.diagonal()) {
    const auto& nd = tree.node(sub.rows);
    if (nd.is_leaf()) {
      out.push_back({sub.rows, sub.cols, 0.0, 0.0, false});
      return out;
    }
    const NodeId first = nd.left;
    const NodeId second = nd.right;
    auto diagonal_block = [&](NodeId id) {
      QuadrantExtremes q{id, id, 0.0, 0.0, false};
      if (!tree.node(id).is_leaf()) q.max_entry = eval({std::span<const NodeId>(&id, 1)}, false);
      return q;
    };
    out.push_back(diagonal_block(first));
    {
      QuadrantExtremes q{first, second, 0.0, 0.0, false};
      const NodeId pair[] = {first, second};
      q.max_entry = eval({pair}, false);
      if (q.max_entry <= window.low) {
        q.min_entry = below;
      } else {
        const NodeId corners[] = {tree.leaf(tree.node(first).hi), tree.leaf(tree.node(second).lo)};
        q.min_entry = eval({corners}, false);
      }
      out.push_back(q);
    }
    out.push_back({second, first, 0.0, 0.0, true});
    out.push_back(diagonal_block(second));
    return out;
  }

  const Halves rows = halves(tree, sub.rows);
  const Halves cols = halves(tree, sub.cols);
  out.reserve(rows.size() * cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::span<const NodeId> rows_after(rows.data() + a + 1, rows.size() - a - 1);
      const std::span<const NodeId> cols_before(cols.data(), c);
      QuadrantExtremes q{rows[a], cols[c], 0.0, 0.0, false};
      // Largest entry: first row to last column.
      q.max_entry = eval({std::span<const NodeId>(&rows[a], 1), rows_after, cols_before,
                          std::span<const NodeId>(&cols[c], 1)},
                         true);
      const bool single = tree.node(rows[a]).is_leaf() && tree.node(cols[c]).is_leaf();
      if (single) {
        q.min_entry = q.max_entry;
      } else if (q.max_entry <= window.low) {
        q.min_entry = below;
      } else {
        // Smallest entry: last row to first column.
        const NodeId last_row = tree.leaf(tree.node(rows[a]).hi);
        const NodeId first_col = tree.leaf(tree.node(cols[c]).lo);
        q.min_entry = eval({std::span<const NodeId>(&last_row, 1), rows_after, cols_before,
                            std::span<const NodeId>(&first_col, 1)},
                           true);
      }
      out.push_back(q);
    }
  }
  return out;
}

SearchState initial_search_state(const IntervalTree& tree, const ErrorWindow& window) {
  SearchState state;
  state.window = window;
  state.active.push_back(ActiveSubmatrix{tree.root(), tree.root(), BoundedEnvelope(Direction::up),
                                         BoundedEnvelope(Direction::down)});
  return state;
}

SearchState run_stage(SearchState state, IntervalTree& tree, std::size_t b, Variant variant, SolverStats& stats) {
  stats.active_per_stage.push_back(state.active.size());

  std::vector<std::vector<QuadrantExtremes>> quads;
  quads.reserve(state.active.size());
  std::vector<double> mins, maxes;
  for (ActiveSubmatrix& sub : state.active) {
    quads.push_back(quadrant_extremes(sub, tree, state.window, &stats));
    for (const auto& q : quads.back()) {
      if (state.window.contains_open(q.min_entry)) mins.push_back(q.min_entry);
      if (state.window.contains_open(q.max_entry)) maxes.push_back(q.max_entry);
    }
  }

  ErrorWindow& window = state.window;
  if (auto e1 = lower_median_in_window(mins, window)) {
    window = test_and_update(tree, *e1, b, variant, window, stats, false);
  }
  if (auto e2 = lower_median_in_window(maxes, window)) {
    window = test_and_update(tree, *e2, b, variant, window, stats, false);
  }

  std::vector<ActiveSubmatrix> next;
  for (std::size_t s = 0; s < state.active.size(); ++s) {
    ActiveSubmatrix& sub = state.active[s];
    const Halves rows = sub.diagonal() ? Halves{} : halves(tree, sub.rows);
    const Halves cols = sub.diagonal() ? Halves{} : halves(tree, sub.cols);
    for (const QuadrantExtremes& q : quads[s]) {
      if (q.below_diagonal) continue;
      if (q.min_entry >= window.high || q.max_entry <= window.low) continue;
      const bool single = tree.node(q.rows).is_leaf() && tree.node(q.cols).is_leaf();
      if (single) {
        state.singles.push_back(q.max_entry);
        continue;
      }
      if (q.rows == q.cols) {
        next.push_back(ActiveSubmatrix{q.rows, q.cols, BoundedEnvelope(Direction::up),
                                       BoundedEnvelope(Direction::down)});
        continue;
      }
      // New gap: rest of the row half, the old gap, the column halves before q.cols.
      std::vector<BoundedEnvelope*> up_parts, down_parts;
      if (!sub.diagonal()) {
        auto a = std::find(rows.begin(), rows.end(), q.rows);
        for (auto it = a + 1; it != rows.end(); ++it) {
          up_parts.push_back(&tree.node(*it).up);
          down_parts.push_back(&tree.node(*it).down);
        }
        up_parts.push_back(&sub.gap_up);
        down_parts.push_back(&sub.gap_down);
        for (auto it = cols.begin(); *it != q.cols; ++it) {
          up_parts.push_back(&tree.node(*it).up);
          down_parts.push_back(&tree.node(*it).down);
        }
      }
      MergeResult up = merge_all(up_parts, Direction::up, window, &stats);
      MergeResult down = merge_all(down_parts, Direction::down, window, &stats);
      state.gap_endpoint_errors.insert(state.gap_endpoint_errors.end(), up.endpoint_errors.begin(),
                                       up.endpoint_errors.end());
      state.gap_endpoint_errors.insert(state.gap_endpoint_errors.end(), down.endpoint_errors.begin(),
                                       down.endpoint_errors.end());
      next.push_back(ActiveSubmatrix{q.rows, q.cols, std::move(up.merged), std::move(down.merged)});
    }
  }
  state.active = std::move(next);

  for (int t = 0; t < 2; ++t) {
    auto e = lower_median_in_window(state.gap_endpoint_errors, window);
    if (!e) break;
    window = test_and_update(tree, *e, b, variant, window, stats, false);
  }
  ++state.stage;
  return state;
}

double final_binary_search(std::vector<double> entries, ErrorWindow& window, IntervalTree& tree, std::size_t b,
                           Variant variant, SolverStats& stats) {
  while (auto e = lower_median_in_window(entries, window)) {
    window = test_and_update(tree, *e, b, variant, window, stats, false);
  }
  return window.high;
}

double solve_min_error(IntervalTree& tree, ErrorWindow& window, std::size_t b, Variant variant, SolverStats& stats) {
  SearchState state = initial_search_state(tree, window);
  while (!state.active.empty()) state = run_stage(std::move(state), tree, b, variant, stats);
  window = state.window;
  return final_binary_search(std::move(state.singles), window, tree, b, variant, stats);
}

}  // namespace stepfit

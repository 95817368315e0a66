#pragma once

#include <cstdint>
#include <vector>

#include "stepfit/core.hpp"
#include "stepfit/envelope.hpp"

namespace stepfit {

enum class Variant { plain, isotonic };

/// Inclusive 1-based index range.
struct IndexRange {
  Index lo = 1;
  Index hi = 1;
  Index length() const noexcept { return hi - lo + 1; }
  bool operator==(const IndexRange&) const = default;
};

/// Splits [i, j] into the binary intervals of the balanced tree on n leaves,
/// left to right (sizes rise then fall).
std::vector<IndexRange> decompose(Index i, Index j, Index n);

/// The eps = 0 test on the raw data: plain passes iff the series has at most
/// b runs of equal values; isotonic additionally needs the runs nondecreasing.
bool base_level_zero_test(const WeightedSeries& series, std::size_t b, Variant variant = Variant::plain);

struct FeasibilityResult {
  bool feasible = false;
  /// 1-based step starts followed by n + 1 (valid only if feasible).
  std::vector<Index> breakpoints;
  /// Per step: [D^-1(eps), U^-1(eps)] over the step's points. In the
  /// isotonic variant the lower end already includes the previous step's value.
  std::vector<std::pair<double, double>> value_intervals;
  /// Isotonic variant: chosen (smallest admissible) value per step.
  std::vector<double> committed_values;
  std::uint64_t nodes_visited = 0;
};

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Balanced binary tree over the index range; every node keeps the upward and
/// downward bounded envelopes of its interval. Leaves are singletons and a
/// node of size s splits into ceil(s/2) + floor(s/2).
class IntervalTree {
 public:
  struct Node {
    Index lo = 0;  // 0-based, inclusive
    Index hi = 0;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    NodeId parent = kNoNode;
    int height = 0;
    int depth = 0;
    BoundedEnvelope up{Direction::up};
    BoundedEnvelope down{Direction::down};

    bool is_leaf() const noexcept { return left == kNoNode; }
    Index size() const noexcept { return hi - lo + 1; }
  };

  /// Shape plus leaf envelopes; only height 0 counts as built.
  explicit IntervalTree(const WeightedSeries& series);

  std::size_t size() const noexcept { return points_.size(); }
  NodeId root() const noexcept { return 0; }
  int height() const noexcept { return nodes_[0].height; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  NodeId leaf(Index i) const { return leaf_of_[static_cast<std::size_t>(i)]; }
  const std::vector<NodeId>& nodes_at_height(int h) const { return by_height_[static_cast<std::size_t>(h)]; }
  const WeightedSeries& series() const noexcept { return points_; }

  int built_height() const noexcept { return built_height_; }
  bool complete() const noexcept { return built_height_ == height(); }
  /// Number of frontier nodes; 1 (the root) once complete.
  std::size_t frontier_size() const noexcept { return frontier_size_; }
  /// Marks heights <= h as built and rebuilds the sideways chain of frontier
  /// nodes (built nodes whose parent is not built yet).
  void set_built_height(int h);

  /// Greedy maximal steps from the left at error eps. Does not touch the
  /// window; eps must lie in (low, high].
  FeasibilityResult feasibility_test(double eps, std::size_t b, Variant variant, const ErrorWindow& window,
                                     SolverStats* stats = nullptr);

  /// Prunes every node to the window.
  void prune_all(const ErrorWindow& window, SolverStats* stats = nullptr);

 private:
  NodeId build_shape(Index lo, Index hi, NodeId parent, int depth);
  bool parent_available(NodeId id) const noexcept;

  WeightedSeries points_;
  std::vector<Node> nodes_;
  std::vector<NodeId> leaf_of_;
  std::vector<std::vector<NodeId>> by_height_;
  std::vector<NodeId> sideways_next_;
  int built_height_ = 0;
  std::size_t frontier_size_ = 0;
};

struct BuildResult {
  IntervalTree tree;
  ErrorWindow window;
  SolverStats stats;
};

/// Builds the tree bottom-up, interleaving feasibility tests at medians of
/// the pending joint errors so the window keeps shrinking. On return every
/// node envelope is a single segment. Precondition: the eps = 0 test failed.
BuildResult build_tree(const WeightedSeries& series, std::size_t b, Variant variant = Variant::plain);

/// Free-function form of IntervalTree::feasibility_test.
FeasibilityResult feasibility_test(IntervalTree& tree, double eps, std::size_t b, Variant variant,
                                   const ErrorWindow& window, SolverStats* stats = nullptr);

/// Runs a test at eps, records it in stats and returns the updated window.
ErrorWindow test_and_update(IntervalTree& tree, double eps, std::size_t b, Variant variant,
                            const ErrorWindow& window, SolverStats& stats, bool during_construction);

/// Removes candidates outside the open window, then returns the lower median,
/// or nullopt if none remain.
std::optional<double> lower_median_in_window(std::vector<double>& candidates, const ErrorWindow& window);

}  // namespace stepfit

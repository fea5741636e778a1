#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hypermult/datasets.hpp"
#include "hypermult/rng.hpp"

namespace hypermult::cart {

struct TreeParams {
  /// Root is depth 0; a node at depth d may split only while d < max_depth.
  std::size_t max_depth = std::numeric_limits<std::size_t>::max();
  /// Nodes with fewer rows are not split.
  std::size_t min_split = 2;
  /// Minimum rows in each child.
  std::size_t min_bucket = 1;
  /// A split must lower the tree's size-weighted Gini impurity by at least
  /// cp times the root impurity (and by a strictly positive amount).
  double cp = 0.0;
  /// Features drawn per split; 0 or >= p means all features, no sampling.
  std::size_t mtry = 0;
};

struct Node {
  std::array<std::size_t, 2> counts{0, 0};
  std::size_t depth = 0;
  // Internal nodes only.
  std::size_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;

  bool is_leaf() const noexcept { return left < 0; }
  std::size_t size() const noexcept { return counts[0] + counts[1]; }
  /// Majority label; ties go to 0.
  Label label() const noexcept { return counts[1] > counts[0] ? 1 : 0; }
};

/// Gini impurity 1 - sum_k (c_k / n)^2 of a two-class count vector.
double gini(const std::array<std::size_t, 2>& counts) noexcept;

/// Binary classification tree grown greedily on Gini impurity. Rows go left
/// when x[feature] <= threshold; thresholds sit midway between consecutive
/// distinct values. Ties between candidate splits resolve to the lower
/// feature index, then the lower threshold.
class Tree {
 public:
  /// `rows` indexes into x/y and may repeat (bootstrap samples). `rng` is
  /// only used when params.mtry samples features.
  static Tree grow(const Matrix& x, std::span<const Label> y, std::span<const std::size_t> rows,
                   const TreeParams& params, CounterRng* rng = nullptr);

  Label predict(std::span<const double> features) const noexcept;
  const Node& leaf_for(std::span<const double> features) const noexcept;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const noexcept;

 private:
  std::vector<Node> nodes_;
};

}  // namespace hypermult::cart

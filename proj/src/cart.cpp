#include "hypermult/cart.hpp"

#include <algorithm>
#include <utility>

#include "hypermult/error.hpp"

namespace hypermult::cart {

double gini(const std::array<std::size_t, 2>& counts) noexcept {
  const double n = static_cast<double>(counts[0] + counts[1]);
  if (n == 0.0) return 0.0;
  const double a = static_cast<double>(counts[0]) / n;
  const double b = static_cast<double>(counts[1]) / n;
  return 1.0 - a * a - b * b;
}

namespace {

// n * gini, computed from counts without the intermediate division.
double weighted_gini(double c0, double c1) noexcept {
  const double n = c0 + c1;
  return n > 0.0 ? n - (c0 * c0 + c1 * c1) / n : 0.0;
}

struct Candidate {
  double decrease = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  bool found = false;
};

struct Pending {
  std::size_t node;
  std::vector<std::size_t> rows;
};

}  // namespace

Tree Tree::grow(const Matrix& x, std::span<const Label> y, std::span<const std::size_t> rows,
                const TreeParams& params, CounterRng* rng) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "tree: rows and labels differ");
  if (rows.empty()) throw Error(ErrorCode::InvalidDataset, "tree: no training rows");
  const std::size_t p = x.cols();
  const bool sample_features = params.mtry > 0 && params.mtry < p;
  if (sample_features && rng == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "tree: feature sampling needs a generator");
  }
  const std::size_t min_bucket = std::max<std::size_t>(params.min_bucket, 1);

  Tree tree;
  std::vector<Pending> stack;
  {
    Node root;
    for (std::size_t r : rows) root.counts[y[r] != 0] += 1;
    tree.nodes_.push_back(root);
    stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end())});
  }
  const double root_impurity = weighted_gini(static_cast<double>(tree.nodes_[0].counts[0]),
                                             static_cast<double>(tree.nodes_[0].counts[1]));
  // cp * (n_root * gini(root)) is the same bar expressed on the n-weighted scale.
  const double required = params.cp * root_impurity;

  std::vector<std::pair<double, Label>> column;
  std::vector<std::size_t> all_features(p);
  for (std::size_t j = 0; j < p; ++j) all_features[j] = j;

  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();
    const Node node = tree.nodes_[item.node];
    const std::size_t n = node.size();
    if (node.depth >= params.max_depth || n < params.min_split || n < 2 * min_bucket ||
        node.counts[0] == 0 || node.counts[1] == 0) {
      continue;
    }
    const double parent = weighted_gini(static_cast<double>(node.counts[0]),
                                        static_cast<double>(node.counts[1]));

    std::vector<std::size_t> features = all_features;
    if (sample_features) {
      features = rng->choose(p, params.mtry);
      std::sort(features.begin(), features.end());
    }

    Candidate best;
    for (std::size_t f : features) {
      column.clear();
      for (std::size_t r : item.rows) column.emplace_back(x(r, f), y[r]);
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double l0 = 0.0;
      double l1 = 0.0;
      const auto t0 = static_cast<double>(node.counts[0]);
      const auto t1 = static_cast<double>(node.counts[1]);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        (column[i].second ? l1 : l0) += 1.0;
        if (!(column[i].first < column[i + 1].first)) continue;
        const std::size_t left = i + 1;
        if (left < min_bucket || n - left < min_bucket) continue;
        const double decrease = parent - weighted_gini(l0, l1) - weighted_gini(t0 - l0, t1 - l1);
        if (!best.found || decrease > best.decrease) {
          double threshold = 0.5 * (column[i].first + column[i + 1].first);
          if (!(threshold < column[i + 1].first)) threshold = column[i].first;
          best = {decrease, f, threshold, true};
        }
      }
    }
    // The epsilon absorbs rounding on splits that leave class ratios unchanged.
    const double epsilon = 1e-12 * static_cast<double>(n);
    if (!best.found || best.decrease <= epsilon || best.decrease < required) continue;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    Node left_node;
    Node right_node;
    left_node.depth = right_node.depth = node.depth + 1;
    for (std::size_t r : item.rows) {
      if (x(r, best.feature) <= best.threshold) {
        left_rows.push_back(r);
        left_node.counts[y[r] != 0] += 1;
      } else {
        right_rows.push_back(r);
        right_node.counts[y[r] != 0] += 1;
      }
    }
    const auto left_index = static_cast<std::int32_t>(tree.nodes_.size());
    tree.nodes_.push_back(left_node);
    tree.nodes_.push_back(right_node);
    Node& parent_node = tree.nodes_[item.node];
    parent_node.feature = best.feature;
    parent_node.threshold = best.threshold;
    parent_node.left = left_index;
    parent_node.right = left_index + 1;
    stack.push_back({static_cast<std::size_t>(left_index + 1), std::move(right_rows)});
    stack.push_back({static_cast<std::size_t>(left_index), std::move(left_rows)});
  }
  return tree;
}

const Node& Tree::leaf_for(std::span<const double> features) const noexcept {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& n = nodes_[i];
    i = static_cast<std::size_t>(features[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

Label Tree::predict(std::span<const double> features) const noexcept {
  return leaf_for(features).label();
}

std::size_t Tree::depth() const noexcept {
  std::size_t d = 0;
  for (const Node& n : nodes_) d = std::max(d, n.depth);
  return d;
}

}  // namespace hypermult::cart

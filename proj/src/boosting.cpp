#include "hypermult/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypermult/error.hpp"
#include "hypermult/rng.hpp"

namespace hypermult::boosting {

double threshold_l1(double g, double alpha) noexcept {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

double leaf_weight(double g, double h, double alpha, double lambda) noexcept {
  return -threshold_l1(g, alpha) / (h + lambda);
}

double leaf_score(double g, double h, double alpha, double lambda) noexcept {
  const double t = threshold_l1(g, alpha);
  return t * t / (h + lambda);
}

std::size_t columns_kept(double fraction, std::size_t available) noexcept {
  const auto kept = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(available)));
  return std::clamp<std::size_t>(kept, 1, std::max<std::size_t>(available, 1));
}

double RegressionTree::predict(std::span<const double> features) const noexcept {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(features[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

double Model::margin(std::span<const double> features) const noexcept {
  double m = base_margin_;
  for (const auto& tree : trees_) m += tree.predict(features);
  return m;
}

namespace {

// Minimum loss reduction for a split to be kept.
constexpr double kMinGain = 1e-6;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct SplitChoice {
  double gain = kMinGain;
  std::size_t feature = 0;
  double threshold = 0.0;
  bool found = false;
};

struct Accumulator {
  double g = 0.0;
  double h = 0.0;
  double last = 0.0;
  bool seen = false;
};

}  // namespace

Model Model::train(const Matrix& x, std::span<const Label> y, const Params& params,
                   std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n != y.size() || n == 0) throw Error(ErrorCode::DimensionMismatch, "boosting: bad training shape");
  if (params.nrounds < 1 || params.max_depth < 1) {
    throw Error(ErrorCode::InvalidConfig, "boosting: nrounds and max_depth must be >= 1");
  }
  if (!(params.lambda >= 0.0) || !(params.alpha >= 0.0) || !(params.eta >= 0.0) ||
      !(params.subsample > 0.0 && params.subsample <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "boosting: invalid regularization or sampling rate");
  }

  Model model;
  std::size_t positives = 0;
  for (Label v : y) positives += v != 0;
  if (positives > 0 && positives < n) {
    const double rate = static_cast<double>(positives) / static_cast<double>(n);
    model.base_margin_ = std::log(rate / (1.0 - rate));
  } else {
    model.base_margin_ = positives == 0 ? -30.0 : 30.0;
  }

  // Presorted row order per feature, reused by every level of every tree.
  std::vector<std::vector<std::size_t>> order(p, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < p; ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<double> margin(n, model.base_margin_);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<std::int32_t> slot(n);  // index into the current level's node list, -1 if inactive
  std::vector<std::size_t> all_features(p);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});

  CounterRng rng(derive_seed(seed, {"boosting"}));
  model.trees_.reserve(params.nrounds);

  for (std::size_t round = 0; round < params.nrounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = sigmoid(margin[i]);
      grad[i] = prob - (y[i] ? 1.0 : 0.0);
      hess[i] = std::max(prob * (1.0 - prob), 1e-16);
    }

    RegressionTree tree;
    TreeNode root;
    std::vector<std::size_t> level;  // node ids at the current depth
    for (std::size_t i = 0; i < n; ++i) {
      const bool keep = params.subsample >= 1.0 || rng.uniform() < params.subsample;
      slot[i] = keep ? 0 : -1;
      if (keep) {
        root.grad_sum += grad[i];
        root.hess_sum += hess[i];
      }
    }
    tree.nodes.push_back(root);
    level.push_back(0);

    std::vector<std::size_t> tree_features = all_features;
    if (params.colsample_bytree < 1.0) {
      tree_features = rng.choose(p, columns_kept(params.colsample_bytree, p));
      std::sort(tree_features.begin(), tree_features.end());
    }

    for (std::size_t depth = 0; depth < params.max_depth && !level.empty(); ++depth) {
      std::vector<std::size_t> level_features = tree_features;
      if (params.colsample_bylevel < 1.0) {
        auto picks = rng.choose(tree_features.size(),
                                columns_kept(params.colsample_bylevel, tree_features.size()));
        std::sort(picks.begin(), picks.end());
        level_features.clear();
        for (std::size_t k : picks) level_features.push_back(tree_features[k]);
      }

      std::vector<SplitChoice> best(level.size());
      std::vector<Accumulator> acc(level.size());
      for (std::size_t f : level_features) {
        std::fill(acc.begin(), acc.end(), Accumulator{});
        for (std::size_t r : order[f]) {
          if (slot[r] < 0) continue;
          const auto k = static_cast<std::size_t>(slot[r]);
          Accumulator& a = acc[k];
          const double v = x(r, f);
          if (a.seen && v > a.last) {
            const TreeNode& node = tree.nodes[level[k]];
            const double gr = node.grad_sum - a.g;
            const double hr = node.hess_sum - a.h;
            if (a.h >= params.min_child_weight && hr >= params.min_child_weight) {
              const double gain =
                  0.5 * (leaf_score(a.g, a.h, params.alpha, params.lambda) +
                         leaf_score(gr, hr, params.alpha, params.lambda) -
                         leaf_score(node.grad_sum, node.hess_sum, params.alpha, params.lambda));
              if (gain > best[k].gain) {
                double threshold = 0.5 * (a.last + v);
                if (!(threshold < v)) threshold = a.last;
                best[k] = {gain, f, threshold, true};
              }
            }
          }
          a.g += grad[r];
          a.h += hess[r];
          a.last = v;
          a.seen = true;
        }
      }

      std::vector<std::size_t> next_level;
      std::vector<std::int32_t> remap(level.size(), -1);
      for (std::size_t k = 0; k < level.size(); ++k) {
        if (!best[k].found) continue;
        const std::size_t id = level[k];
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        TreeNode child;
        child.depth = depth + 1;
        tree.nodes.push_back(child);
        tree.nodes.push_back(child);
        tree.nodes[id].feature = best[k].feature;
        tree.nodes[id].threshold = best[k].threshold;
        tree.nodes[id].left = left;
        tree.nodes[id].right = left + 1;
        remap[k] = static_cast<std::int32_t>(next_level.size());
        next_level.push_back(static_cast<std::size_t>(left));
        next_level.push_back(static_cast<std::size_t>(left + 1));
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (slot[i] < 0) continue;
        const auto k = static_cast<std::size_t>(slot[i]);
        if (remap[k] < 0) {
          slot[i] = -1;
          continue;
        }
        const TreeNode& parent = tree.nodes[level[k]];
        const bool go_left = x(i, parent.feature) <= parent.threshold;
        const std::int32_t s = remap[k] + (go_left ? 0 : 1);
        slot[i] = s;
        TreeNode& child = tree.nodes[next_level[static_cast<std::size_t>(s)]];
        child.grad_sum += grad[i];
        child.hess_sum += hess[i];
      }
      level = std::move(next_level);
    }

    for (TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        node.value = params.eta * leaf_weight(node.grad_sum, node.hess_sum, params.alpha, params.lambda);
      }
    }
    for (std::size_t i = 0; i < n; ++i) margin[i] += tree.predict(x.row(i));
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

}  // namespace hypermult::boosting

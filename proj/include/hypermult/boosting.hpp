#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypermult/datasets.hpp"

namespace hypermult::boosting {

struct Params {
  std::size_t nrounds = 500;
  double eta = 0.3;
  double subsample = 1.0;
  std::size_t max_depth = 6;
  double min_child_weight = 1.0;
  double colsample_bytree = 1.0;
  double colsample_bylevel = 1.0;
  double lambda = 1.0;
  double alpha = 0.0;
};

/// L1-soft-thresholded gradient sum: sign(G) * max(|G| - alpha, 0).
double threshold_l1(double g, double alpha) noexcept;

/// Newton leaf weight with elastic regularization:
///   w = -sign(G) * max(|G| - alpha, 0) / (H + lambda)
double leaf_weight(double g, double h, double alpha, double lambda) noexcept;

/// Structure score of a leaf, threshold_l1(G)^2 / (H + lambda). A split's gain
/// is half the children's scores minus the parent's.
double leaf_score(double g, double h, double alpha, double lambda) noexcept;

/// Columns kept by a fractional subsample of `available`: max(1, floor(fraction * size)).
std::size_t columns_kept(double fraction, std::size_t available) noexcept;

struct TreeNode {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf output, already scaled by eta
  double grad_sum = 0.0;
  double hess_sum = 0.0;
  std::size_t depth = 0;

  bool is_leaf() const noexcept { return left < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> features) const noexcept;
};

/// Second-order boosting of depth-limited regression trees on the logistic
/// loss. Training starts from the log-odds of the positive rate.
class Model {
 public:
  static Model train(const Matrix& x, std::span<const Label> y, const Params& params,
                     std::uint64_t seed);

  double margin(std::span<const double> features) const noexcept;
  /// margin > 0 means probability above 0.5; exactly 0.5 maps to label 0.
  Label predict(std::span<const double> features) const noexcept { return margin(features) > 0.0; }

  double base_margin() const noexcept { return base_margin_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  double base_margin_ = 0.0;
  std::vector<RegressionTree> trees_;
};

}  // namespace hypermult::boosting

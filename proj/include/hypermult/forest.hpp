#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypermult/cart.hpp"

namespace hypermult::forest {

struct Params {
  std::size_t num_trees = 500;
  /// Bootstrap size as a fraction of the training rows (drawn with replacement).
  double sample_fraction = 1.0;
  /// 0 selects round(sqrt(p)).
  std::size_t mtry = 0;
  /// Minimum rows per leaf.
  std::size_t min_node_size = 1;
};

/// Bagged Gini trees; prediction is the majority vote, ties to label 0.
class Model {
 public:
  static Model train(const Matrix& x, std::span<const Label> y, const Params& params,
                     std::uint64_t seed);

  Label predict(std::span<const double> features) const noexcept;
  const std::vector<cart::Tree>& trees() const noexcept { return trees_; }

 private:
  std::vector<cart::Tree> trees_;
};

}  // namespace hypermult::forest

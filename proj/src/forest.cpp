#include "hypermult/forest.hpp"

#include <algorithm>
#include <cmath>

#include "hypermult/error.hpp"
#include "hypermult/rng.hpp"

namespace hypermult::forest {

Model Model::train(const Matrix& x, std::span<const Label> y, const Params& params,
                   std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n != y.size() || n == 0) throw Error(ErrorCode::DimensionMismatch, "forest: bad training shape");
  if (params.num_trees == 0) throw Error(ErrorCode::InvalidConfig, "forest: num.trees must be >= 1");
  if (!(params.sample_fraction > 0.0 && params.sample_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "forest: sample.fraction must lie in (0,1]");
  }

  cart::TreeParams tree_params;
  tree_params.mtry = params.mtry == 0
                         ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p))))
                         : std::min(params.mtry, p);
  tree_params.mtry = std::max<std::size_t>(tree_params.mtry, 1);
  tree_params.min_bucket = std::max<std::size_t>(params.min_node_size, 1);
  tree_params.min_split = 2 * tree_params.min_bucket;
  tree_params.cp = 0.0;

  const auto bag = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(params.sample_fraction * static_cast<double>(n))));

  Model model;
  model.trees_.reserve(params.num_trees);
  std::vector<std::size_t> rows(bag);
  for (std::size_t t = 0; t < params.num_trees; ++t) {
    CounterRng rng(derive_seed(seed, t));
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    model.trees_.push_back(cart::Tree::grow(x, y, rows, tree_params, &rng));
  }
  return model;
}

Label Model::predict(std::span<const double> features) const noexcept {
  std::size_t ones = 0;
  for (const auto& tree : trees_) ones += tree.predict(features);
  return 2 * ones > trees_.size() ? 1 : 0;
}

}  // namespace hypermult::forest

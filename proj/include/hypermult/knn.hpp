#pragma once

#include <span>

#include "hypermult/datasets.hpp"

namespace hypermult::knn {

/// k-nearest-neighbour vote under Euclidean distance on standardized
/// features. Every training row tied with the k-th smallest distance joins
/// the vote. A tied vote goes to the single nearest row (lowest index among
/// equal distances).
class Model {
 public:
  Model() = default;
  Model(const Matrix& x, std::span<const Label> y, std::size_t k);

  Label predict(std::span<const double> features) const;

  std::size_t k() const noexcept { return k_; }
  const Standardizer& standardizer() const noexcept { return scaler_; }

 private:
  Standardizer scaler_;
  Matrix train_;
  Labels labels_;
  std::size_t k_ = 1;
};

}  // namespace hypermult::knn

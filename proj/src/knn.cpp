#include "hypermult/knn.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hypermult/error.hpp"

namespace hypermult::knn {

Model::Model(const Matrix& x, std::span<const Label> y, std::size_t k)
    : scaler_(x), train_(scaler_.transform(x)), labels_(y.begin(), y.end()), k_(k) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "knn: bad training shape");
  }
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "knn: k must be >= 1");
}

Label Model::predict(std::span<const double> features) const {
  const std::size_t n = train_.rows();
  const std::size_t p = train_.cols();
  if (features.size() != p) throw Error(ErrorCode::DimensionMismatch, "knn: feature count mismatch");

  std::vector<double> query(p);
  scaler_.transform_row(features, query);

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = train_.row(i);
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) d += (row[j] - query[j]) * (row[j] - query[j]);
    dist[i] = d;
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });

  const std::size_t k = std::min(k_, n);
  const double cutoff = dist[idx[k - 1]];
  std::size_t votes[2] = {0, 0};
  for (std::size_t r = 0; r < n && (r < k || dist[idx[r]] == cutoff); ++r) {
    votes[labels_[idx[r]]] += 1;
  }
  if (votes[0] == votes[1]) return labels_[idx[0]];
  return votes[1] > votes[0] ? 1 : 0;
}

}  // namespace hypermult::knn

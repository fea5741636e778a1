#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hypermult/error.hpp"
#include "hypermult/knn.hpp"
#include "hypermult/learners.hpp"
#include "support/synthetic.hpp"

using namespace hypermult;

namespace {

// Brute force: standardize with population sd, take every row within the
// k-th smallest distance, majority vote, ties to the nearest row.
Label oracle(const Matrix& x, const Labels& y, std::size_t k, std::span<const double> q) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += x(i, j) / n;
    for (std::size_t i = 0; i < n; ++i) sd[j] += (x(i, j) - mean[j]) * (x(i, j) - mean[j]) / n;
    sd[j] = sd[j] > 0 ? std::sqrt(sd[j]) : 1.0;
  }
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const double a = (x(i, j) - mean[j]) / sd[j], b = (q[j] - mean[j]) / sd[j];
      s += (a - b) * (a - b);
    }
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  const double cutoff = d[std::min(k, n) - 1].first;
  int votes[2] = {0, 0};
  for (const auto& [dist, i] : d) {
    if (dist <= cutoff) ++votes[y[i]];
  }
  if (votes[0] == votes[1]) return y[d[0].second];
  return votes[1] > votes[0];
}

}  // namespace

TEST_CASE("k = 1 reproduces the training labels") {
  auto d = testing::linear_dataset(80, 3, 21, 1.0);
  knn::Model m(d.features, d.labels, 1);
  for (std::size_t i = 0; i < d.n(); ++i) CHECK(m.predict(d.features.row(i)) == d.labels[i]);
}

TEST_CASE("predictions match a brute-force neighbour vote") {
  CounterRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 10 + rng.below(40), p = 1 + rng.below(4);
    auto d = testing::linear_dataset(n, p, rng.next(), 1.0);
    // Coarse grid values create distance ties.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) d.features(i, j) = std::round(d.features(i, j) * 2) / 2;
    }
    const std::size_t k = 1 + rng.below(30);
    knn::Model m(d.features, d.labels, k);
    auto queries = testing::linear_dataset(20, p, rng.next());
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(m.predict(queries.features.row(i)) == oracle(d.features, d.labels, k, queries.features.row(i)));
    }
  }
}

TEST_CASE("identical training rows vote as a block") {
  Matrix x(5, 2, 1.0);
  Labels y{1, 0, 1, 1, 0};
  for (std::size_t k : {1u, 2u, 5u}) {
    knn::Model m(x, y, k);
    CHECK(m.predict(x.row(0)) == 1);
  }
}

TEST_CASE("tied votes go to the nearest row") {
  Matrix x(4, 1, std::vector<double>{0.0, 1.0, 3.0, 10.0});
  Labels y{1, 0, 0, 1};
  knn::Model m(x, y, 2);
  const double q = 0.2;
  CHECK(m.predict(std::span<const double>(&q, 1)) == 1);
  const double r = 0.9;
  CHECK(m.predict(std::span<const double>(&r, 1)) == 0);
}

TEST_CASE("k larger than the training set uses every row") {
  Matrix x(3, 1, std::vector<double>{0, 1, 2});
  Labels y{1, 1, 0};
  knn::Model m(x, y, 30);
  const double q = 2.0;
  CHECK(m.predict(std::span<const double>(&q, 1)) == 1);
}

TEST_CASE("knn input checks") {
  Matrix x(3, 2);
  Labels y{0, 1, 0};
  CHECK_THROWS_AS(knn::Model(x, y, 0), Error);
  knn::Model m(x, y, 1);
  std::vector<double> q(3);
  CHECK_THROWS_AS(m.predict(q), Error);
}

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "hypermult/cart.hpp"
#include "hypermult/error.hpp"
#include "hypermult/learners.hpp"
#include "support/synthetic.hpp"

using namespace hypermult;
using cart::Node;
using cart::Tree;
using cart::TreeParams;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

double weighted(const std::array<std::size_t, 2>& c) {
  return static_cast<double>(c[0] + c[1]) * cart::gini(c);
}

// Rows reaching every node, recovered by routing the training rows.
std::vector<std::vector<std::size_t>> node_rows(const Tree& t, const Matrix& x, std::span<const std::size_t> rows) {
  std::vector<std::vector<std::size_t>> out(t.nodes().size());
  for (std::size_t r : rows) {
    std::size_t i = 0;
    out[i].push_back(r);
    while (!t.nodes()[i].is_leaf()) {
      const Node& n = t.nodes()[i];
      i = static_cast<std::size_t>(x(r, n.feature) <= n.threshold ? n.left : n.right);
      out[i].push_back(r);
    }
  }
  return out;
}

// Best admissible Gini decrease at a node by exhaustive enumeration.
double brute_best(const Matrix& x, const Labels& y, const std::vector<std::size_t>& rows, std::size_t min_bucket) {
  double best = 0.0;
  std::array<std::size_t, 2> total{0, 0};
  for (std::size_t r : rows) ++total[y[r]];
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::vector<double> values;
    for (std::size_t r : rows) values.push_back(x(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      std::array<std::size_t, 2> left{0, 0}, right{0, 0};
      for (std::size_t r : rows) ++(x(r, f) <= values[k] ? left : right)[y[r]];
      if (left[0] + left[1] < min_bucket || right[0] + right[1] < min_bucket) continue;
      best = std::max(best, weighted(total) - weighted(left) - weighted(right));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("gini impurity") {
  CHECK(cart::gini({0, 0}) == 0.0);
  CHECK(cart::gini({5, 0}) == 0.0);
  CHECK(cart::gini({5, 5}) == doctest::Approx(0.5));
  CHECK(cart::gini({1, 3}) == doctest::Approx(0.375));
}

TEST_CASE("a depth-one tree finds the separating threshold") {
  Matrix x(8, 1, std::vector<double>{0.1, 0.4, 0.2, 0.9, 1.3, 0.3, 1.1, 2.0});
  Labels y{0, 0, 0, 1, 1, 0, 1, 1};
  auto t = Tree::grow(x, y, all_rows(8), {.max_depth = 1, .min_split = 2, .min_bucket = 1, .cp = 0.0});
  REQUIRE(t.nodes().size() == 3);
  CHECK(t.nodes()[0].feature == 0);
  CHECK(t.nodes()[0].threshold == doctest::Approx(0.65));
  for (std::size_t i = 0; i < 8; ++i) CHECK(t.predict(x.row(i)) == y[i]);
}

TEST_CASE("random trees respect cp, minbucket, minsplit and maxdepth") {
  CounterRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + rng.below(80), p = 1 + rng.below(4);
    auto d = testing::linear_dataset(n, p, rng.next(), 0.8 * rng.uniform(), 0.0);
    if (rng.uniform() < 0.3) {
      for (std::size_t i = 0; i < n; ++i) d.features(i, 0) = std::round(d.features(i, 0));
    }
    TreeParams params;
    params.max_depth = 1 + rng.below(6);
    params.min_bucket = 1 + rng.below(8);
    params.min_split = 1 + rng.below(20);
    params.cp = rng.uniform() < 0.3 ? 0.0 : 0.05 * rng.uniform();
    const auto rows = all_rows(n);
    auto t = Tree::grow(d.features, d.labels, rows, params);
    const auto reach = node_rows(t, d.features, rows);
    const double root = weighted(t.nodes()[0].counts);

    for (std::size_t i = 0; i < t.nodes().size(); ++i) {
      const Node& node = t.nodes()[i];
      std::array<std::size_t, 2> counts{0, 0};
      for (std::size_t r : reach[i]) ++counts[d.labels[r]];
      REQUIRE(counts == node.counts);
      if (node.is_leaf()) {
        const double best = brute_best(d.features, d.labels, reach[i], params.min_bucket);
        // A leaf either hit a stopping rule or had no admissible improving split.
        const bool stopped = node.depth >= params.max_depth || node.size() < params.min_split ||
                             node.counts[0] == 0 || node.counts[1] == 0;
        if (!stopped) CHECK((best <= 1e-12 * node.size() || best < params.cp * root));
        continue;
      }
      const Node& l = t.nodes()[node.left];
      const Node& r = t.nodes()[node.right];
      CHECK(node.size() >= params.min_split);
      CHECK(node.depth < params.max_depth);
      CHECK(l.size() >= params.min_bucket);
      CHECK(r.size() >= params.min_bucket);
      CHECK(l.depth == node.depth + 1);
      const double decrease = weighted(node.counts) - weighted(l.counts) - weighted(r.counts);
      CHECK(decrease >= params.cp * root - 1e-12);
      CHECK(decrease > 0.0);
      // Greedy: the chosen split is the best admissible one.
      CHECK(decrease == doctest::Approx(brute_best(d.features, d.labels, reach[i], params.min_bucket)));
    }
    CHECK(t.depth() <= params.max_depth);
  }
}

TEST_CASE("leaf ties go to label 0") {
  Matrix x(4, 1, std::vector<double>{1, 1, 1, 1});
  Labels y{0, 1, 1, 0};
  auto t = Tree::grow(x, y, all_rows(4), {});
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.predict(x.row(0)) == 0);
}

TEST_CASE("split ties prefer the lower feature index") {
  // Both columns separate the classes identically.
  Matrix x(4, 2, std::vector<double>{0, 0, 1, 1, 2, 2, 3, 3});
  Labels y{0, 0, 1, 1};
  auto t = Tree::grow(x, y, all_rows(4), {});
  CHECK(t.nodes()[0].feature == 0);
  CHECK(t.nodes()[0].threshold == 1.5);
}

TEST_CASE("bootstrap rows may repeat") {
  Matrix x(3, 1, std::vector<double>{0, 1, 2});
  Labels y{0, 1, 1};
  std::vector<std::size_t> rows{0, 0, 0, 1, 2};
  auto t = Tree::grow(x, y, rows, {});
  CHECK(t.nodes()[0].counts == std::array<std::size_t, 2>{3, 2});
  CHECK(t.nodes()[0].threshold == 0.5);
}

TEST_CASE("feature sampling needs a generator") {
  Matrix x(4, 3);
  Labels y{0, 1, 0, 1};
  CHECK_THROWS_AS(Tree::grow(x, y, all_rows(4), {.mtry = 1}), Error);
}

TEST_CASE("decision tree learner maps rpart parameters") {
  auto d = testing::linear_dataset(80, 3, 4, 0.4);
  auto space = space_for(ModelKind::DecisionTree, d);
  auto stump = train(ModelKind::DecisionTree,
                     Config({{"cp", 0.0}, {"maxdepth", 1}, {"minbucket", 1}, {"minsplit", 2}}), d, 0);
  const auto& tree = std::get<cart::Tree>(stump.state);
  CHECK(tree.nodes().size() == 3);

  auto full = train(ModelKind::DecisionTree, space.default_config(), d, 0);
  for (const auto& node : std::get<cart::Tree>(full.state).nodes()) {
    if (!node.is_leaf()) CHECK(node.size() >= 20);
    CHECK(node.size() >= 7);
  }
}

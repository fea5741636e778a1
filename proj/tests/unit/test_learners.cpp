#include <doctest.h>

#include "hypermult/error.hpp"
#include "hypermult/learners.hpp"
#include "hypermult/metrics.hpp"
#include "support/synthetic.hpp"

using namespace hypermult;

namespace {

SplitPair toy_split(std::uint64_t seed = 1) {
  return split(testing::linear_dataset(120, 4, seed, 0.6, 0.3, "toy"), 0.3, seed);
}

}  // namespace

TEST_CASE("a default-only sweep has one default entry") {
  auto s = toy_split();
  for (ModelKind kind : kBuiltinModels) {
    auto space = space_for(kind, s.train);
    auto ps = run_sweep(kind, {space.default_config()}, s, 5);
    REQUIRE(ps.entries.size() == 1);
    CHECK(ps.entries[0].config.is_default());
    CHECK(ps.default_entry == 0);
    CHECK(ps.entries[0].labels.size() == s.eval.n());
    CHECK(ps.eval_labels == s.eval.labels);
    CHECK(ps.n_train == s.train.n());
    CHECK(ps.n_features == 4);
    CHECK_THROWS_AS(model_discrepancy(ps), Error);
  }
}

TEST_CASE("sweeps are deterministic and schedule independent") {
  auto s = toy_split(2);
  for (ModelKind kind : kBuiltinModels) {
    auto space = space_for(kind, s.train);
    auto configs = sample_full(space, 6, 3);
    if (kind == ModelKind::RandomForest || kind == ModelKind::GradientBoosting) {
      // Keep the ensemble sizes small for test time.
      const char* size = kind == ModelKind::RandomForest ? "num.trees" : "nrounds";
      for (auto& c : configs) {
        if (!c.is_default()) c = c.with(size, std::min(c.at(size), 40.0));
      }
    }
    auto a = run_sweep(kind, configs, s, 7);
    auto b = run_sweep(kind, configs, s, 7);
    auto c = run_sweep(kind, configs, s, 7, {.jobs = 3});
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("a failing config is isolated") {
  auto s = toy_split(3);
  auto space = space_for(ModelKind::KNN, s.train);
  std::vector<Config> configs{Config({{"k", 3}}), Config({{"k", 45}}), Config({{"k", 2.5}}), space.default_config()};
  auto ps = run_sweep(ModelKind::KNN, configs, s, 1);
  CHECK_FALSE(ps.entries[0].failed);
  CHECK(ps.entries[1].failed);
  CHECK(ps.entries[2].failed);
  CHECK(ps.entries[1].labels.empty());
  CHECK(ps.entries[1].message.find("InvalidConfig") != std::string::npos);
  CHECK(ps.failed_count() == 2);
  CHECK(model_discrepancy(ps).argmax_config == configs[0]);
}

TEST_CASE("a failing default aborts the sweep") {
  auto s = toy_split(4);
  std::vector<Config> configs{Config({{"k", 3}}), Config({{"k", 2.5}}, true)};
  CHECK_THROWS_AS(run_sweep(ModelKind::KNN, configs, s, 1), Error);
  CHECK_THROWS_AS(run_sweep(ModelKind::KNN, {Config({{"k", 3}})}, s, 1), Error);
}

TEST_CASE("train validates model and config") {
  auto d = testing::linear_dataset(40, 2, 1);
  try {
    train(ModelKind::SVM, Config({{"cost", 1}}), d, 0);
    FAIL("expected UnknownModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownModel);
  }
  try {
    train(ModelKind::KNN, Config({{"k", 3}, {"p", 2}}), d, 0);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
  auto m = train(ModelKind::KNN, Config({{"k", 3}}), d, 0);
  try {
    predict(m, Matrix(2, 3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("config seeds separate datasets, models and configs") {
  Config a({{"k", 3}}), b({{"k", 4}});
  CHECK(config_seed(1, "d", ModelKind::KNN, a) == config_seed(1, "d", ModelKind::KNN, a));
  CHECK(config_seed(1, "d", ModelKind::KNN, a) != config_seed(1, "d", ModelKind::KNN, b));
  CHECK(config_seed(1, "d", ModelKind::KNN, a) != config_seed(1, "e", ModelKind::KNN, a));
  CHECK(config_seed(1, "d", ModelKind::KNN, a) != config_seed(2, "d", ModelKind::KNN, a));
}

TEST_CASE("every learner beats chance on easy data") {
  auto s = split(testing::linear_dataset(200, 3, 12, 0.2, 0.0), 0.3, 1);
  for (ModelKind kind : kBuiltinModels) {
    auto cfg = space_for(kind, s.train).default_config();
    if (kind == ModelKind::RandomForest) cfg = cfg.with("num.trees", 50);
    auto m = train(kind, cfg, s.train, 3);
    auto pred = predict(m, s.eval.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == s.eval.labels[i];
    CAPTURE(model_name(kind));
    CHECK(correct >= pred.size() * 3 / 4);
  }
}

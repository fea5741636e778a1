#pragma once

#include <cstdint>
#include <variant>

#include "hypermult/boosting.hpp"
#include "hypermult/cart.hpp"
#include "hypermult/datasets.hpp"
#include "hypermult/forest.hpp"
#include "hypermult/knn.hpp"
#include "hypermult/prediction_set.hpp"
#include "hypermult/spaces.hpp"

namespace hypermult {

struct ElasticNetState {
  Standardizer scaler;
  std::vector<double> weights;
  double intercept = 0.0;
};

struct FittedModel {
  ModelKind kind = ModelKind::KNN;
  Config config;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  /// Set when the elastic-net solver stopped at its iteration cap.
  bool non_convergence = false;
  std::variant<ElasticNetState, cart::Tree, knn::Model, forest::Model, boosting::Model> state;
};

/// Fits one model family. InvalidConfig when the config is not a point of
/// the family's space (the default config is exempt from bounds).
FittedModel train(ModelKind kind, const Config& config, const Dataset& train, std::uint64_t seed);

/// Hard labels, one per row. DimensionMismatch on a wrong column count.
Labels predict(const FittedModel& model, const Matrix& features);

/// Seed for one configuration's training run.
std::uint64_t config_seed(std::uint64_t seed, std::string_view dataset_id, ModelKind kind,
                          const Config& config);

struct SweepOptions {
  /// Worker threads; results are identical for any value.
  std::size_t jobs = 1;
};

/// Trains every config on `train` and predicts `eval`. A config that throws
/// is recorded as failed; the sweep continues. The default config must
/// train, otherwise its error propagates.
PredictionSet run_sweep(ModelKind kind, const std::vector<Config>& configs, const Dataset& train,
                        const Dataset& eval, std::uint64_t seed, const SweepOptions& options = {});
PredictionSet run_sweep(ModelKind kind, const std::vector<Config>& configs, const SplitPair& splits,
                        std::uint64_t seed, const SweepOptions& options = {});

}  // namespace hypermult

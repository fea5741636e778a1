#include "hypermult/learners.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "hypermult/elastic_net.hpp"
#include "hypermult/error.hpp"
#include "hypermult/rng.hpp"

namespace hypermult {
namespace {

std::size_t as_count(const Config& config, const char* name) {
  return static_cast<std::size_t>(std::llround(config.at(name)));
}

Matrix standardized_copy(const Standardizer& scaler, const Matrix& x) { return scaler.transform(x); }

}  // namespace

FittedModel train(ModelKind kind, const Config& config, const Dataset& train, std::uint64_t seed) {
  if (!has_builtin_trainer(kind)) {
    throw Error(ErrorCode::UnknownModel, "svm has no built-in trainer; use prediction import");
  }
  train.validate(2);
  space_for(kind, train).validate(config);

  FittedModel model;
  model.kind = kind;
  model.config = config;
  model.seed = seed;
  model.n_features = train.p();

  switch (kind) {
    case ModelKind::ElasticNet: {
      ElasticNetState state;
      state.scaler = Standardizer(train.features);
      const Matrix x = standardized_copy(state.scaler, train.features);
      elastic_net::Problem problem{x, train.labels, config.at("lambda"), config.at("alpha")};
      auto fit = elastic_net::solve(problem);
      state.weights = std::move(fit.weights);
      state.intercept = fit.intercept;
      model.non_convergence = !fit.converged;
      model.state = std::move(state);
      break;
    }
    case ModelKind::DecisionTree: {
      cart::TreeParams params;
      params.cp = config.at("cp");
      params.max_depth = as_count(config, "maxdepth");
      params.min_bucket = as_count(config, "minbucket");
      params.min_split = as_count(config, "minsplit");
      std::vector<std::size_t> rows(train.n());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      model.state = cart::Tree::grow(train.features, train.labels, rows, params);
      break;
    }
    case ModelKind::KNN:
      model.state = knn::Model(train.features, train.labels, as_count(config, "k"));
      break;
    case ModelKind::RandomForest: {
      forest::Params params;
      params.num_trees = as_count(config, "num.trees");
      params.sample_fraction = config.at("sample.fraction");
      params.mtry = as_count(config, "mtry");
      params.min_node_size = as_count(config, "min.node.size");
      model.state = forest::Model::train(train.features, train.labels, params, seed);
      break;
    }
    case ModelKind::GradientBoosting: {
      boosting::Params params;
      params.nrounds = as_count(config, "nrounds");
      params.eta = config.at("eta");
      params.subsample = config.at("subsample");
      params.max_depth = as_count(config, "max_depth");
      params.min_child_weight = config.at("min_child_weight");
      params.colsample_bytree = config.at("colsample_bytree");
      params.colsample_bylevel = config.at("colsample_bylevel");
      params.lambda = config.at("lambda");
      params.alpha = config.at("alpha");
      model.state = boosting::Model::train(train.features, train.labels, params, seed);
      break;
    }
    case ModelKind::SVM:
      break;
  }
  return model;
}

Labels predict(const FittedModel& model, const Matrix& features) {
  if (features.cols() != model.n_features) {
    throw Error(ErrorCode::DimensionMismatch, "model trained on " + std::to_string(model.n_features) +
                                                  " features, got " + std::to_string(features.cols()));
  }
  Labels out(features.rows());
  std::visit(
      [&](const auto& state) {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, ElasticNetState>) {
          std::vector<double> z(features.cols());
          for (std::size_t r = 0; r < features.rows(); ++r) {
            state.scaler.transform_row(features.row(r), z);
            double m = state.intercept;
            for (std::size_t j = 0; j < z.size(); ++j) m += z[j] * state.weights[j];
            out[r] = m > 0.0 ? 1 : 0;
          }
        } else {
          for (std::size_t r = 0; r < features.rows(); ++r) out[r] = state.predict(features.row(r));
        }
      },
      model.state);
  return out;
}

std::uint64_t config_seed(std::uint64_t seed, std::string_view dataset_id, ModelKind kind,
                          const Config& config) {
  return derive_seed(seed, {"train", dataset_id, model_name(kind), config.id()});
}

PredictionSet run_sweep(ModelKind kind, const std::vector<Config>& configs, const Dataset& train_data,
                        const Dataset& eval, std::uint64_t seed, const SweepOptions& options) {
  std::size_t defaults = 0;
  for (const auto& c : configs) defaults += c.is_default();
  if (configs.empty() || defaults != 1) {
    throw Error(ErrorCode::InvalidConfig, "sweep needs a nonempty config list with exactly one default");
  }

  PredictionSet ps;
  ps.dataset_id = train_data.id;
  ps.model = kind;
  ps.positive_label = train_data.positive_label;
  ps.eval_labels = eval.labels;
  ps.n_train = train_data.n();
  ps.n_features = train_data.p();
  ps.entries.resize(configs.size());
  std::vector<std::exception_ptr> default_error(1);

  auto run_one = [&](std::size_t i) {
    PredictionEntry& entry = ps.entries[i];
    entry.config = configs[i];
    try {
      FittedModel model = train(kind, configs[i], train_data, config_seed(seed, train_data.id, kind, configs[i]));
      entry.labels = predict(model, eval.features);
      entry.warning = model.non_convergence;
      if (entry.warning) entry.message = "NonConvergence: solver hit its iteration cap";
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.labels.clear();
      entry.message = e.what();
      if (configs[i].is_default()) default_error[0] = std::current_exception();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, configs.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) run_one(i);
      });
    }
    for (auto& t : workers) t.join();
  }
  if (default_error[0]) std::rethrow_exception(default_error[0]);
  ps.validate();
  return ps;
}

PredictionSet run_sweep(ModelKind kind, const std::vector<Config>& configs, const SplitPair& splits,
                        std::uint64_t seed, const SweepOptions& options) {
  return run_sweep(kind, configs, splits.train, splits.eval, seed, options);
}

}  // namespace hypermult

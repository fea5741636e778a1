#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypermult/datasets.hpp"

namespace hypermult {

enum class ModelKind { ElasticNet, DecisionTree, KNN, RandomForest, GradientBoosting, SVM };

/// The five families with a built-in trainer, in report order.
inline constexpr ModelKind kBuiltinModels[] = {ModelKind::ElasticNet, ModelKind::DecisionTree,
                                               ModelKind::KNN, ModelKind::RandomForest,
                                               ModelKind::GradientBoosting};

/// Canonical lower-case name ("elastic_net", "knn", ...).
std::string_view model_name(ModelKind kind);
/// Accepts canonical names and the usual short forms (EN, DT, kNN, RF, XGB, SVM).
ModelKind parse_model(std::string_view name);
bool has_builtin_trainer(ModelKind kind) noexcept;

enum class ParamKind { Real, Integer };
enum class Scale { Linear, Log2 };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Real;
  double lower = 0.0;
  double upper = 0.0;
  Scale scale = Scale::Linear;
  double default_value = 0.0;
  /// Non-empty for dataset-derived defaults or bounds: "1/p", "sqrt(p)", "n", "p".
  std::string rule;

  bool contains(double v) const noexcept;
  /// Maps a value onto the axis the parameter is swept on (exponent for log2).
  double to_axis(double v) const noexcept;
  double from_axis(double a) const noexcept;
};

/// A point in a search space. The id is a hash of the value map, so equal
/// values always share an id regardless of the default flag.
class Config {
 public:
  Config() = default;
  explicit Config(std::map<std::string, double> values, bool is_default = false);

  const std::map<std::string, double>& values() const noexcept { return values_; }
  const std::string& id() const noexcept { return id_; }
  bool is_default() const noexcept { return is_default_; }

  double at(const std::string& name) const;
  Config with(const std::string& name, double value) const;
  Config as_non_default() const { return Config(values_, false); }

  /// Parameter names whose values differ from `other`.
  std::vector<std::string> differing(const Config& other) const;

  bool same_values(const Config& other) const noexcept { return values_ == other.values_; }
  bool operator==(const Config&) const = default;

 private:
  std::map<std::string, double> values_;
  std::string id_;
  bool is_default_ = false;
};

std::string config_id(const std::map<std::string, double>& values);

struct HyperparamSpace {
  ModelKind model = ModelKind::KNN;
  std::vector<ParamSpec> params;

  const ParamSpec& param(std::string_view name) const;
  bool has(std::string_view name) const noexcept;
  std::vector<std::string> names() const;
  Config default_config() const;

  /// InvalidConfig unless the config names exactly this space's parameters
  /// and each value is in bounds (integers integral). The default config, and
  /// any value equal to its parameter's default, is exempt from bounds.
  void validate(const Config& config) const;
};

/// Built-in search space with defaults and dataset-derived bounds resolved
/// against n (rows) and p (features). UnknownModel for SVM, which is audited
/// through imported predictions only.
HyperparamSpace space_for(ModelKind model, std::size_t n, std::size_t p);
HyperparamSpace space_for(ModelKind model, const Dataset& train);

/// Reference space for any model, SVM included; used to bound-check imported
/// config metadata.
HyperparamSpace reference_space(ModelKind model, std::size_t n, std::size_t p);

/// `count` configs drawn independently per parameter (log-uniform for log2
/// params, uniform integers for integer params), then the default appended.
std::vector<Config> sample_full(const HyperparamSpace& space, std::size_t count, std::uint64_t seed);

/// Evenly spaced axis values for one parameter on its own scale, endpoints
/// included, integers rounded and deduplicated, and the default inserted when
/// absent. points == 1 yields the default alone.
std::vector<double> axis_points(const ParamSpec& spec, std::size_t points);

/// Configs varying only `h` over its axis, others at default. The all-default
/// point is represented once, by the trailing default config.
std::vector<Config> marginal_grid(const HyperparamSpace& space, std::string_view h, std::size_t points);

/// Cartesian product of the two axes, others at default; default appended.
std::vector<Config> pairwise_grid(const HyperparamSpace& space, std::string_view h1,
                                  std::string_view h2, std::size_t points_per_axis);

}  // namespace hypermult

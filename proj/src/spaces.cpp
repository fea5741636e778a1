#include "hypermult/spaces.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "hypermult/error.hpp"
#include "hypermult/rng.hpp"

namespace hypermult {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ElasticNet: return "elastic_net";
    case ModelKind::DecisionTree: return "decision_tree";
    case ModelKind::KNN: return "knn";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::GradientBoosting: return "gradient_boosting";
    case ModelKind::SVM: return "svm";
  }
  return "unknown";
}

ModelKind parse_model(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == ' ' || c == '.') c = '_';
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  static const std::pair<const char*, ModelKind> table[] = {
      {"elastic_net", ModelKind::ElasticNet},  {"elasticnet", ModelKind::ElasticNet},
      {"en", ModelKind::ElasticNet},           {"glmnet", ModelKind::ElasticNet},
      {"decision_tree", ModelKind::DecisionTree}, {"decisiontree", ModelKind::DecisionTree},
      {"dt", ModelKind::DecisionTree},         {"rpart", ModelKind::DecisionTree},
      {"knn", ModelKind::KNN},                 {"k_nearest_neighbor", ModelKind::KNN},
      {"kknn", ModelKind::KNN},                {"random_forest", ModelKind::RandomForest},
      {"randomforest", ModelKind::RandomForest}, {"rf", ModelKind::RandomForest},
      {"ranger", ModelKind::RandomForest},     {"gradient_boosting", ModelKind::GradientBoosting},
      {"gradientboosting", ModelKind::GradientBoosting}, {"xgb", ModelKind::GradientBoosting},
      {"xgboost", ModelKind::GradientBoosting}, {"svm", ModelKind::SVM},
  };
  for (const auto& [alias, kind] : table) {
    if (key == alias) return kind;
  }
  throw Error(ErrorCode::UnknownModel,
              "unknown model '" + std::string(name) +
                  "' (expected elastic_net, decision_tree, knn, random_forest, gradient_boosting or svm)");
}

bool has_builtin_trainer(ModelKind kind) noexcept { return kind != ModelKind::SVM; }

bool ParamSpec::contains(double v) const noexcept {
  if (!(v >= lower && v <= upper)) return false;
  return kind != ParamKind::Integer || std::floor(v) == v;
}

double ParamSpec::to_axis(double v) const noexcept {
  return scale == Scale::Log2 ? std::log2(v) : v;
}

double ParamSpec::from_axis(double a) const noexcept {
  return scale == Scale::Log2 ? std::exp2(a) : a;
}

std::string config_id(const std::map<std::string, double>& values) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& [name, value] : values) {
    double v = value == 0.0 ? 0.0 : value;  // fold -0.0 into 0.0
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    h = fnv1a64(name, h);
    h = fnv1a64("=", h);
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&bits), sizeof(bits)), h);
    h = fnv1a64(";", h);
  }
  h = mix64(h);
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

Config::Config(std::map<std::string, double> values, bool is_default)
    : values_(std::move(values)), is_default_(is_default) {
  for (auto& [name, v] : values_) {
    if (v == 0.0) v = 0.0;
  }
  id_ = config_id(values_);
}

double Config::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error(ErrorCode::UnknownParam, "config has no parameter '" + name + "'");
  return it->second;
}

Config Config::with(const std::string& name, double value) const {
  auto values = values_;
  values[name] = value;
  return Config(std::move(values), false);
}

std::vector<std::string> Config::differing(const Config& other) const {
  std::vector<std::string> out;
  for (const auto& [name, v] : values_) {
    auto it = other.values_.find(name);
    if (it == other.values_.end() || it->second != v) out.push_back(name);
  }
  for (const auto& [name, v] : other.values_) {
    if (!values_.contains(name)) out.push_back(name);
  }
  return out;
}

const ParamSpec& HyperparamSpace::param(std::string_view name) const {
  for (const auto& spec : params) {
    if (spec.name == name) return spec;
  }
  std::string valid;
  for (const auto& spec : params) valid += (valid.empty() ? "" : ", ") + spec.name;
  throw Error(ErrorCode::UnknownParam, "no hyperparameter '" + std::string(name) + "' for " +
                                           std::string(model_name(model)) + " (valid: " + valid + ")");
}

bool HyperparamSpace::has(std::string_view name) const noexcept {
  return std::any_of(params.begin(), params.end(), [&](const ParamSpec& s) { return s.name == name; });
}

std::vector<std::string> HyperparamSpace::names() const {
  std::vector<std::string> out;
  for (const auto& spec : params) out.push_back(spec.name);
  return out;
}

Config HyperparamSpace::default_config() const {
  std::map<std::string, double> values;
  for (const auto& spec : params) values[spec.name] = spec.default_value;
  return Config(std::move(values), true);
}

void HyperparamSpace::validate(const Config& config) const {
  if (config.values().size() != params.size()) {
    throw Error(ErrorCode::InvalidConfig, "config for " + std::string(model_name(model)) + " has " +
                                              std::to_string(config.values().size()) +
                                              " values, expected " + std::to_string(params.size()));
  }
  for (const auto& spec : params) {
    auto it = config.values().find(spec.name);
    if (it == config.values().end()) {
      throw Error(ErrorCode::InvalidConfig, "config lacks '" + spec.name + "'");
    }
    const double v = it->second;
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, spec.name + " is not finite");
    if (spec.kind == ParamKind::Integer && std::floor(v) != v) {
      throw Error(ErrorCode::InvalidConfig, spec.name + " must be an integer");
    }
    // A literal default such as lambda = 0 may sit outside the sampling range.
    if (!config.is_default() && v != spec.default_value && !spec.contains(v)) {
      throw Error(ErrorCode::InvalidConfig, spec.name + "=" + std::to_string(v) + " outside [" +
                                                std::to_string(spec.lower) + ", " +
                                                std::to_string(spec.upper) + "]");
    }
  }
}

namespace {

ParamSpec real(std::string name, double lo, double hi, double def, Scale scale = Scale::Linear) {
  return ParamSpec{std::move(name), ParamKind::Real, lo, hi, scale, def, {}};
}

ParamSpec integer(std::string name, double lo, double hi, double def, std::string rule = {}) {
  return ParamSpec{std::move(name), ParamKind::Integer, lo, hi, Scale::Linear, def, std::move(rule)};
}

constexpr double kLog2Lo = 0x1.0p-10;
constexpr double kLog2Hi = 0x1.0p10;

}  // namespace

HyperparamSpace reference_space(ModelKind model, std::size_t n, std::size_t p) {
  const auto dn = static_cast<double>(n);
  const auto dp = static_cast<double>(p);
  HyperparamSpace space{model, {}};
  switch (model) {
    case ModelKind::ElasticNet:
      space.params = {real("alpha", 0, 1, 1), real("lambda", kLog2Lo, kLog2Hi, 0, Scale::Log2)};
      break;
    case ModelKind::DecisionTree:
      space.params = {real("cp", 0, 1, 0.1), integer("maxdepth", 1, 30, 30),
                      integer("minbucket", 1, 60, 7), integer("minsplit", 1, 60, 20)};
      break;
    case ModelKind::KNN:
      space.params = {integer("k", 1, 30, 7)};
      break;
    case ModelKind::SVM: {
      auto gamma = real("gamma", kLog2Lo, kLog2Hi, p > 0 ? 1.0 / dp : 1.0, Scale::Log2);
      gamma.rule = "default=1/p";
      space.params = {real("cost", kLog2Lo, kLog2Hi, 1, Scale::Log2), gamma,
                      integer("degree", 2, 5, 3)};
      break;
    }
    case ModelKind::RandomForest:
      space.params = {integer("num.trees", 1, 2000, 500), real("sample.fraction", 0.1, 1, 1),
                      integer("mtry", 0, dp, std::round(std::sqrt(dp)), "upper=p; default=sqrt(p)"),
                      integer("min.node.size", 1, std::max(1.0, dn), 1, "upper=n")};
      break;
    case ModelKind::GradientBoosting:
      space.params = {integer("nrounds", 1, 5000, 500),
                      real("eta", 0, 1, 0.3),
                      real("subsample", 0.1, 1, 1),
                      integer("max_depth", 1, 15, 6),
                      real("min_child_weight", 1, 14, 1),
                      real("colsample_bytree", 0, 1, 1),
                      real("colsample_bylevel", 0, 1, 1),
                      real("lambda", kLog2Lo, kLog2Hi, 1, Scale::Log2),
                      real("alpha", kLog2Lo, kLog2Hi, 0, Scale::Log2)};
      break;
  }
  return space;
}

HyperparamSpace space_for(ModelKind model, std::size_t n, std::size_t p) {
  if (!has_builtin_trainer(model)) {
    throw Error(ErrorCode::UnknownModel,
                "svm has no built-in search space; audit SVM sweeps through `import`");
  }
  if (p == 0) throw Error(ErrorCode::InvalidDataset, "space needs at least one feature");
  return reference_space(model, n, p);
}

HyperparamSpace space_for(ModelKind model, const Dataset& train) {
  return space_for(model, train.n(), train.p());
}

std::vector<Config> sample_full(const HyperparamSpace& space, std::size_t count, std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, {"sample_full", model_name(space.model)}));
  std::vector<Config> out;
  out.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    std::map<std::string, double> values;
    for (const auto& spec : space.params) {
      double v = 0.0;
      if (spec.kind == ParamKind::Integer) {
        v = static_cast<double>(rng.integer(static_cast<std::int64_t>(std::ceil(spec.lower)),
                                            static_cast<std::int64_t>(std::floor(spec.upper))));
      } else if (spec.scale == Scale::Log2) {
        v = std::clamp(std::exp2(rng.uniform(std::log2(spec.lower), std::log2(spec.upper))),
                       spec.lower, spec.upper);
      } else {
        v = rng.uniform(spec.lower, spec.upper);
      }
      values[spec.name] = v;
    }
    out.emplace_back(std::move(values), false);
  }
  out.push_back(space.default_config());
  return out;
}

std::vector<double> axis_points(const ParamSpec& spec, std::size_t points) {
  if (points == 0) throw Error(ErrorCode::InvalidConfig, "grid needs at least one point");
  std::vector<double> values;
  if (points >= 2) {
    const double lo = spec.to_axis(spec.lower);
    const double hi = spec.to_axis(spec.upper);
    const auto steps = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      double v = i + 1 == points ? spec.upper
                                 : spec.from_axis(lo + (hi - lo) * static_cast<double>(i) / steps);
      if (i == 0) v = spec.lower;
      if (spec.kind == ParamKind::Integer) v = std::round(v);
      values.push_back(std::clamp(v, spec.lower, spec.upper));
    }
  }
  values.push_back(spec.default_value);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<Config> marginal_grid(const HyperparamSpace& space, std::string_view h, std::size_t points) {
  const ParamSpec& spec = space.param(h);
  const Config def = space.default_config();
  std::vector<Config> out;
  for (double v : axis_points(spec, points)) {
    if (v == spec.default_value) continue;
    out.push_back(def.with(spec.name, v));
  }
  out.push_back(def);
  return out;
}

std::vector<Config> pairwise_grid(const HyperparamSpace& space, std::string_view h1,
                                  std::string_view h2, std::size_t points_per_axis) {
  if (h1 == h2) throw Error(ErrorCode::SameParam, "pairwise grid needs two distinct parameters");
  const ParamSpec& s1 = space.param(h1);
  const ParamSpec& s2 = space.param(h2);
  const Config def = space.default_config();
  std::vector<Config> out;
  const auto axis2 = axis_points(s2, points_per_axis);
  for (double v1 : axis_points(s1, points_per_axis)) {
    for (double v2 : axis2) {
      if (v1 == s1.default_value && v2 == s2.default_value) continue;
      out.push_back(def.with(s1.name, v1).with(s2.name, v2));
    }
  }
  out.push_back(def);
  return out;
}

}  // namespace hypermult

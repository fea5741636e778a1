#include "hypermult/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hypermult/error.hpp"
#include "hypermult/interchange.hpp"
#include "hypermult/learners.hpp"
#include "hypermult/metrics.hpp"
#include "hypermult/rng.hpp"

namespace hypermult {

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::uint64_t h = fnv1a64(buffer.str());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

// ---------------------------------------------------------------------------
// Sweep config

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::SchemaError, "sweep config: " + what);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_error("unknown key '" + it.key() + "' in " + where);
  }
}

std::size_t positive_count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) config_error(what + " must be a positive integer");
  return v.get<std::size_t>();
}

EvalOn parse_eval_on(const std::string& s) {
  if (s == "holdout") return EvalOn::Holdout;
  if (s == "train") return EvalOn::Train;
  config_error("eval_on must be 'holdout' or 'train'");
}

Impute parse_impute(const std::string& s) {
  if (s == "reject") return Impute::Reject;
  if (s == "mean") return Impute::Mean;
  config_error("impute must be 'reject' or 'mean'");
}

}  // namespace

SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) config_error("top level must be an object");
  check_keys(root, {"seed", "split_fraction", "eval_on", "impute", "axis_bins", "datasets", "models"},
             "top level");

  SweepConfig cfg;
  try {
    if (root.contains("seed")) cfg.settings.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("split_fraction")) cfg.settings.split_fraction = root["split_fraction"].get<double>();
    if (root.contains("eval_on")) cfg.settings.eval_on = parse_eval_on(root["eval_on"].get<std::string>());
    if (root.contains("impute")) cfg.settings.impute = parse_impute(root["impute"].get<std::string>());
    if (root.contains("axis_bins")) cfg.settings.axis_bins = positive_count(root["axis_bins"], "axis_bins");

    if (root.contains("datasets")) {
      if (!root["datasets"].is_array()) config_error("datasets must be an array");
      for (const auto& d : root["datasets"]) {
        DatasetSpec spec;
        if (d.is_string()) {
          spec.path = d.get<std::string>();
        } else if (d.is_object()) {
          check_keys(d, {"path", "target", "positive", "id"}, "dataset entry");
          if (!d.contains("path")) config_error("dataset entry lacks 'path'");
          spec.path = d["path"].get<std::string>();
          if (d.contains("target")) {
            spec.target = d["target"].is_string() ? d["target"].get<std::string>()
                                                  : std::to_string(d["target"].get<long long>());
          }
          if (d.contains("positive")) {
            spec.positive = d["positive"].is_string() ? d["positive"].get<std::string>() : d["positive"].dump();
          }
          if (d.contains("id")) spec.id = d["id"].get<std::string>();
        } else {
          config_error("dataset entries are paths or objects");
        }
        if (spec.path.is_relative() && !base_dir.empty()) spec.path = base_dir / spec.path;
        cfg.datasets.push_back(std::move(spec));
      }
    }

    if (!root.contains("models") || !root["models"].is_array() || root["models"].empty()) {
      config_error("models must be a non-empty array");
    }
    for (const auto& m : root["models"]) {
      ModelPlan plan;
      if (m.is_string()) {
        plan.model = parse_model(m.get<std::string>());
      } else if (m.is_object()) {
        check_keys(m, {"model", "count", "marginal", "joint"}, "model entry");
        if (!m.contains("model")) config_error("model entry lacks 'model'");
        plan.model = parse_model(m["model"].get<std::string>());
        if (m.contains("count")) plan.count = positive_count(m["count"], "count");
        if (m.contains("marginal")) {
          if (!m["marginal"].is_object()) config_error("marginal must map parameter names to points");
          for (auto it = m["marginal"].begin(); it != m["marginal"].end(); ++it) {
            plan.marginal.emplace_back(it.key(), positive_count(it.value(), "marginal points"));
          }
        }
        if (m.contains("joint")) {
          for (const auto& j : m["joint"]) {
            check_keys(j, {"h1", "h2", "points"}, "joint entry");
            JointPlan jp{j.at("h1").get<std::string>(), j.at("h2").get<std::string>(), 5};
            if (j.contains("points")) jp.points = positive_count(j["points"], "joint points");
            plan.joint.push_back(std::move(jp));
          }
        }
      } else {
        config_error("model entries are names or objects");
      }
      if (!has_builtin_trainer(plan.model)) {
        throw Error(ErrorCode::UnknownModel,
                    "svm has no built-in trainer; export its predictions in the interchange format "
                    "and run `hypermult import`");
      }
      // Parameter names are checked against the space with placeholder dims.
      const auto space = space_for(plan.model, 100, 4);
      for (const auto& [name, points] : plan.marginal) space.param(name);
      for (const auto& jp : plan.joint) {
        space.param(jp.h1);
        space.param(jp.h2);
        if (jp.h1 == jp.h2) throw Error(ErrorCode::SameParam, "joint entry repeats '" + jp.h1 + "'");
      }
      cfg.models.push_back(std::move(plan));
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open sweep config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_config(buffer.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

struct Loaded {
  Dataset train;
  Dataset eval;
  DatasetMeta meta;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_tag(std::string s) {
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

// Re-raises with dataset/model context, keeping the code.
template <typename F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), context + ": " + e.message());
  }
}

class Run {
 public:
  Run(std::string command, const RunSettings& settings, const OutputOptions& output)
      : settings_(settings), output_(output) {
    outcome_.report.meta.tool_version = kToolVersion;
    outcome_.report.meta.command = std::move(command);
    outcome_.report.meta.seed = settings.seed;
    outcome_.report.meta.split_fraction = settings.split_fraction;
    outcome_.report.meta.eval_on = settings.eval_on == EvalOn::Train ? "train" : "holdout";
    outcome_.report.meta.impute = settings.impute == Impute::Mean ? "mean" : "reject";
    if (!output.omit_timestamps) started_ = utc_timestamp();
    if (output_.out_dir.empty()) throw Error(ErrorCode::IoError, "no output directory given");
    const auto report = output_.out_dir / "report.json";
    if (!output_.force && std::filesystem::exists(report)) {
      throw Error(ErrorCode::IoError, report.string() + " exists; pass --force to overwrite");
    }
    std::filesystem::create_directories(output_.out_dir / "predictions");
  }

  void log(const std::string& line) const {
    if (output_.log) *output_.log << "[hypermult] " << line << '\n';
  }

  Loaded load(const DatasetSpec& spec) {
    return with_context(spec.path.string(), [&] {
      CsvOptions options;
      options.target = spec.target;
      options.positive = spec.positive;
      options.impute = settings_.impute;
      options.id = spec.id;
      Dataset d = load_csv(spec.path, options);
      for (const auto& m : outcome_.report.meta.datasets) {
        if (m.id == d.id) throw Error(ErrorCode::InvalidDataset, "duplicate dataset id '" + d.id + "'");
      }
      SplitPair sp = split(d, settings_.split_fraction, derive_seed(settings_.seed, {"split", d.id}));
      Loaded out;
      out.meta.id = d.id;
      out.meta.source = spec.path.filename().string();
      out.meta.fingerprint = file_fingerprint(spec.path);
      out.meta.n = d.n();
      out.meta.p = d.p();
      out.meta.n_train = sp.train.n();
      out.meta.positive_label = d.label_names[d.positive_label];
      out.train = std::move(sp.train);
      out.eval = settings_.eval_on == EvalOn::Train ? out.train : std::move(sp.eval);
      out.meta.n_eval = out.eval.n();
      outcome_.report.meta.datasets.push_back(out.meta);
      log("loaded " + d.id + " (n=" + std::to_string(d.n()) + ", p=" + std::to_string(d.p()) +
          ", train=" + std::to_string(out.train.n()) + ", eval=" + std::to_string(out.eval.n()) + ")");
      return out;
    });
  }

  PredictionSet sweep(const Loaded& data, ModelKind model, const std::vector<Config>& configs,
                      const std::string& tag) {
    const std::string context = data.meta.id + "/" + std::string(model_name(model)) + "/" + tag;
    log("sweeping " + context + " over " + std::to_string(configs.size()) + " configs");
    PredictionSet ps = with_context(context, [&] {
      return run_sweep(model, configs, data.train, data.eval, settings_.seed, {output_.jobs});
    });
    note_failures(ps, context);
    counts_[std::string(model_name(model)) + "/" + tag] += configs.size();
    const auto path = output_.out_dir / "predictions" /
                      (file_tag(data.meta.id) + "__" + std::string(model_name(model)) + "__" +
                       file_tag(tag) + ".tsv");
    export_predictions(ps, path);
    outcome_.files.push_back(path);
    return ps;
  }

  std::optional<DatasetResult> score(const PredictionSet& ps, const Scope& scope) {
    DatasetResult r;
    try {
      switch (scope.kind) {
        case Scope::Kind::Model: r.discrepancy = model_discrepancy(ps); break;
        case Scope::Kind::Marginal: r.discrepancy = marginal_discrepancy(ps, scope.h1); break;
        case Scope::Kind::Joint: r.discrepancy = joint_discrepancy(ps, scope.h1, scope.h2); break;
      }
      r.tunability = tunability(ps, scope);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoComparableEntry) throw;
      log(std::string("skipped ") + e.what());
      ++skipped_;
      return std::nullopt;
    }
    r.n_configs = ps.entries.size();
    for (const auto& e : ps.entries) {
      if (e.failed) r.failed_configs.push_back(e.config.id());
      r.warnings += e.warning;
    }
    return r;
  }

  Report& report() { return outcome_.report; }

  void note_failures(const PredictionSet& ps, const std::string& context) {
    for (const auto& e : ps.entries) {
      if (e.failed) log("config " + e.config.id() + " failed in " + context + ": " + e.message);
    }
    outcome_.failed_configs += ps.failed_count();
  }

  RunOutcome finish() {
    Report& report = outcome_.report;
    if (!output_.omit_timestamps) report.meta.timestamp = started_;
    auto json_files = emit(report, ReportFormat::Json, output_.out_dir / "report.json", output_.force);
    auto csv_files = emit(report, ReportFormat::Csv, output_.out_dir / "csv", output_.force);
    outcome_.files.insert(outcome_.files.end(), json_files.begin(), json_files.end());
    outcome_.files.insert(outcome_.files.end(), csv_files.begin(), csv_files.end());

    nlohmann::ordered_json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = report.meta.command;
    if (!output_.command_line.empty()) manifest["command_line"] = output_.command_line;
    manifest["seed"] = settings_.seed;
    manifest["split_fraction"] = settings_.split_fraction;
    manifest["eval_on"] = report.meta.eval_on;
    manifest["impute"] = report.meta.impute;
    if (settings_.axis_bins) manifest["axis_bins"] = *settings_.axis_bins;
    if (!plans_.empty()) manifest["models"] = plans_;
    auto datasets = nlohmann::ordered_json::array();
    for (const auto& d : report.meta.datasets) {
      datasets.push_back({{"id", d.id}, {"source", d.source}, {"fingerprint", d.fingerprint}});
    }
    manifest["datasets"] = datasets;
    manifest["config_counts"] = counts_;
    manifest["failed_configs"] = outcome_.failed_configs;
    if (!output_.omit_timestamps) {
      manifest["started_at"] = started_;
      manifest["finished_at"] = utc_timestamp();
    }
    const auto manifest_path = output_.out_dir / "manifest.json";
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest_path.string());
    out << manifest.dump(2) << '\n';
    outcome_.files.push_back(manifest_path);

    outcome_.exit_code = outcome_.failed_configs > 0 || skipped_ > 0 ? 2 : 0;
    log("wrote " + std::to_string(outcome_.files.size()) + " files to " + output_.out_dir.string());
    return std::move(outcome_);
  }

  const RunSettings& settings() const { return settings_; }

  void record_plan(const ModelPlan& plan, bool with_count) {
    nlohmann::ordered_json entry;
    entry["model"] = model_name(plan.model);
    if (with_count) entry["count"] = plan.count;
    if (!plan.marginal.empty()) {
      nlohmann::ordered_json marginal = nlohmann::ordered_json::object();
      for (const auto& [param, points] : plan.marginal) marginal[param] = points;
      entry["marginal"] = marginal;
    }
    for (const auto& jp : plan.joint) {
      entry["joint"].push_back({{"h1", jp.h1},
                                {"h2", jp.h2},
                                {"points", jp.points},
                                {"axis_bins", settings_.axis_bins.value_or(jp.points)}});
    }
    plans_.push_back(std::move(entry));
  }

 private:
  RunSettings settings_;
  OutputOptions output_;
  RunOutcome outcome_;
  std::string started_;
  std::map<std::string, std::size_t> counts_;
  std::size_t skipped_ = 0;
  nlohmann::ordered_json plans_ = nlohmann::ordered_json::array();
};

template <typename Results>
AggregateStat aggregate_discrepancy(const Results& results) {
  std::vector<double> v;
  for (const auto& r : results) v.push_back(r.discrepancy.value);
  return aggregate(v);
}

template <typename Results>
AggregateStat aggregate_tunability(const Results& results) {
  std::vector<double> v;
  for (const auto& r : results) v.push_back(r.tunability.value);
  return aggregate(v);
}

// Axis spec for a panel spanning several datasets: dataset-derived upper
// bounds take their widest value.
ParamSpec panel_axis(ModelKind model, const std::vector<Loaded>& data, const std::string& name) {
  ParamSpec spec = space_for(model, data.front().train).param(name);
  for (const auto& d : data) spec.upper = std::max(spec.upper, space_for(model, d.train).param(name).upper);
  return spec;
}

void run_marginal(Run& run, const std::vector<Loaded>& data, ModelKind model, const std::string& param,
                  std::size_t points) {
  MarginalGroup group;
  group.model = model;
  group.param = param;
  for (const auto& d : data) {
    const auto space = space_for(model, d.train);
    auto configs = marginal_grid(space, param, points);
    auto ps = run.sweep(d, model, configs, "marginal-" + param);
    if (auto r = run.score(ps, Scope::marginal(param))) group.results.push_back(std::move(*r));
  }
  if (group.results.empty()) return;
  group.discrepancy = aggregate_discrepancy(group.results);
  group.tunability = aggregate_tunability(group.results);
  run.report().marginal.push_back(std::move(group));
}

void run_joint(Run& run, const std::vector<Loaded>& data, ModelKind model, const JointPlan& plan) {
  JointGroup group;
  group.model = model;
  group.h1 = plan.h1;
  group.h2 = plan.h2;
  std::vector<PredictionSet> sets;
  for (const auto& d : data) {
    const auto space = space_for(model, d.train);
    auto configs = pairwise_grid(space, plan.h1, plan.h2, plan.points);
    auto ps = run.sweep(d, model, configs, "joint-" + plan.h1 + "-" + plan.h2);
    if (auto r = run.score(ps, Scope::joint(plan.h1, plan.h2))) {
      JointDatasetResult jr;
      jr.joint = std::move(*r);
      for (int axis = 0; axis < 2; ++axis) {
        const std::string& h = axis == 0 ? plan.h1 : plan.h2;
        try {
          auto m = marginal_discrepancy(restrict_to(ps, {h}), h);
          (axis == 0 ? jr.marginal_h1 : jr.marginal_h2) = m;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoComparableEntry) throw;
        }
      }
      group.results.push_back(std::move(jr));
    }
    sets.push_back(std::move(ps));
  }
  if (!group.results.empty()) {
    std::vector<double> v;
    for (const auto& r : group.results) v.push_back(r.joint.discrepancy.value);
    group.discrepancy = aggregate(v);
    run.report().joint.push_back(std::move(group));
  }
  run.report().bivariate.push_back(make_panel(model, panel_axis(model, data, plan.h1),
                                              panel_axis(model, data, plan.h2), sets,
                                              run.settings().axis_bins.value_or(plan.points)));
}

std::vector<Loaded> load_all(Run& run, const std::vector<DatasetSpec>& specs) {
  if (specs.empty()) throw Error(ErrorCode::InvalidDataset, "no datasets given");
  std::vector<Loaded> data;
  for (const auto& spec : specs) data.push_back(run.load(spec));
  return data;
}

}  // namespace

RunOutcome cmd_sweep(const SweepConfig& config, const OutputOptions& output) {
  Run run("sweep", config.settings, output);
  const auto data = load_all(run, config.datasets);
  for (const auto& plan : config.models) run.record_plan(plan, true);
  for (const auto& plan : config.models) {
    if (!has_builtin_trainer(plan.model)) {
      throw Error(ErrorCode::UnknownModel, "svm has no built-in trainer; use `hypermult import`");
    }
    for (const auto& d : data) {
      const auto space = space_for(plan.model, d.train);
      const auto configs =
          sample_full(space, plan.count,
                      derive_seed(config.settings.seed, {"sample", d.meta.id, model_name(plan.model)}));
      auto ps = run.sweep(d, plan.model, configs, "full");
      if (auto r = run.score(ps, Scope::model())) run.report().per_dataset.push_back(std::move(*r));
    }
    for (const auto& [param, points] : plan.marginal) run_marginal(run, data, plan.model, param, points);
    for (const auto& jp : plan.joint) run_joint(run, data, plan.model, jp);
  }
  run.report().summary = summary_table(run.report().per_dataset);
  return run.finish();
}

RunOutcome cmd_marginal(ModelKind model, const std::string& param, std::size_t points,
                        const std::vector<DatasetSpec>& datasets, const RunSettings& settings,
                        const OutputOptions& output) {
  space_for(model, 100, 4).param(param);
  Run run("marginal", settings, output);
  ModelPlan plan{model, 0, {{param, points}}, {}};
  run.record_plan(plan, false);
  const auto data = load_all(run, datasets);
  run_marginal(run, data, model, param, points);
  return run.finish();
}

RunOutcome cmd_joint(ModelKind model, const std::string& h1, const std::string& h2,
                     std::size_t points, const std::vector<DatasetSpec>& datasets,
                     const RunSettings& settings, const OutputOptions& output) {
  const auto probe = space_for(model, 100, 4);
  probe.param(h1);
  probe.param(h2);
  if (h1 == h2) throw Error(ErrorCode::SameParam, "joint needs two distinct parameters");
  Run run("joint", settings, output);
  ModelPlan plan{model, 0, {}, {{h1, h2, points}}};
  run.record_plan(plan, false);
  const auto data = load_all(run, datasets);
  run_joint(run, data, model, plan.joint.front());
  return run.finish();
}

RunOutcome cmd_import(const std::vector<std::filesystem::path>& files, const OutputOptions& output) {
  if (files.empty()) throw Error(ErrorCode::SchemaError, "no prediction files given");
  Run run("import", RunSettings{}, output);
  std::map<std::pair<int, std::string>, MarginalGroup> marginals;
  for (const auto& path : files) {
    PredictionSet ps = with_context(path.string(), [&] {
      // Dataset-derived bounds are only checked when the file states the shape.
      PredictionSet raw = import_predictions_file(path);
      const std::size_t n = raw.n_train ? raw.n_train : std::numeric_limits<std::uint32_t>::max();
      const std::size_t p = raw.n_features ? raw.n_features : std::numeric_limits<std::uint32_t>::max();
      return import_predictions_file(path, reference_space(raw.model, n, p));
    });
    run.log("imported " + path.string() + " (" + ps.dataset_id + "/" +
            std::string(model_name(ps.model)) + ", " + std::to_string(ps.entries.size()) + " configs)");
    DatasetMeta meta;
    meta.id = ps.dataset_id;
    meta.source = path.filename().string();
    meta.fingerprint = file_fingerprint(path);
    meta.n_train = ps.n_train;
    meta.p = ps.n_features;
    meta.n_eval = ps.eval_labels.size();
    run.report().meta.datasets.push_back(meta);
    run.note_failures(ps, path.filename().string());

    if (auto r = run.score(ps, Scope::model())) run.report().per_dataset.push_back(std::move(*r));
    for (const auto& h : marginal_params(ps)) {
      if (auto r = run.score(restrict_to(ps, {h}), Scope::marginal(h))) {
        auto& group = marginals[{static_cast<int>(ps.model), h}];
        group.model = ps.model;
        group.param = h;
        group.results.push_back(std::move(*r));
      }
    }
  }
  for (auto& [key, group] : marginals) {
    group.discrepancy = aggregate_discrepancy(group.results);
    group.tunability = aggregate_tunability(group.results);
    run.report().marginal.push_back(std::move(group));
  }
  run.report().summary = summary_table(run.report().per_dataset);
  return run.finish();
}

}  // namespace hypermult

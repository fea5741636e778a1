#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hypermult/error.hpp"
#include "hypermult/interchange.hpp"
#include "hypermult/learners.hpp"
#include "hypermult/metrics.hpp"
#include "hypermult/pipeline.hpp"
#include "hypermult/reports.hpp"

namespace py = pybind11;
using namespace hypermult;

namespace {

ModelKind model_arg(const std::string& name) { return parse_model(name); }

Scope scope_arg(const std::string& kind, const std::vector<std::string>& params) {
  if (kind == "model") return Scope::model();
  if (kind == "marginal" && params.size() == 1) return Scope::marginal(params[0]);
  if (kind == "joint" && params.size() == 2) return Scope::joint(params[0], params[1]);
  throw Error(ErrorCode::SchemaError, "scope must be model, marginal with one param, or joint with two");
}

RunSettings settings_arg(std::uint64_t seed, double split_fraction, const std::string& eval_on,
                         const std::string& impute, std::optional<std::size_t> axis_bins) {
  RunSettings s;
  s.seed = seed;
  s.split_fraction = split_fraction;
  s.eval_on = eval_on == "train" ? EvalOn::Train : EvalOn::Holdout;
  s.impute = impute == "mean" ? Impute::Mean : Impute::Reject;
  s.axis_bins = axis_bins;
  return s;
}

OutputOptions output_arg(const std::filesystem::path& out, bool force, std::size_t jobs) {
  OutputOptions o;
  o.out_dir = out;
  o.force = force;
  o.jobs = jobs;
  return o;
}

std::vector<DatasetSpec> specs_arg(const std::vector<std::filesystem::path>& paths, const std::string& target,
                                   const std::optional<std::string>& positive) {
  std::vector<DatasetSpec> out;
  for (const auto& p : paths) out.push_back({p, target, positive, {}});
  return out;
}

// Outcome as (exit_code, failed_configs, report JSON text).
py::tuple outcome_tuple(const RunOutcome& o) {
  return py::make_tuple(o.exit_code, o.failed_configs, to_json(o.report).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperparameter multiplicity: sweeps, discrepancy and tunability";
  m.attr("__version__") = kToolVersion;

  static py::handle error_type = py::exception<Error>(m, "HypermultError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("code") = std::string(error_code_name(e.code()));
      err.attr("detail") = e.message();
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("id", &Dataset::id)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("positive_label", &Dataset::positive_label)
      .def_readonly("label_names", &Dataset::label_names)
      .def_property_readonly("features", [](const Dataset& d) {
        std::vector<std::vector<double>> rows(d.n());
        for (std::size_t i = 0; i < d.n(); ++i) rows[i].assign(d.features.row(i).begin(), d.features.row(i).end());
        return rows;
      })
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset " + d.id + " n=" + std::to_string(d.n()) + " p=" + std::to_string(d.p()) + ">";
      });

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& target, const std::optional<std::string>& positive,
         const std::string& impute, const std::optional<std::string>& id) {
        CsvOptions o;
        o.target = target;
        o.positive = positive;
        o.impute = impute == "mean" ? Impute::Mean : Impute::Reject;
        o.id = id;
        return load_csv(path, o);
      },
      py::arg("path"), py::arg("target") = "", py::arg("positive") = py::none(), py::arg("impute") = "reject",
      py::arg("id") = py::none());
  m.def(
      "split",
      [](const Dataset& d, double fraction, std::uint64_t seed) {
        auto s = split(d, fraction, seed);
        return py::make_tuple(s.train, s.eval);
      },
      py::arg("dataset"), py::arg("fraction") = 0.3, py::arg("seed") = 0);

  py::class_<Config>(m, "Config")
      .def(py::init<std::map<std::string, double>, bool>(), py::arg("values"), py::arg("is_default") = false)
      .def_property_readonly("values", &Config::values)
      .def_property_readonly("id", &Config::id)
      .def_property_readonly("is_default", &Config::is_default)
      .def("with_value", &Config::with)
      .def(py::self == py::self)
      .def("__repr__", [](const Config& c) { return "<Config " + c.id() + (c.is_default() ? " default>" : ">"); });

  py::class_<ParamSpec>(m, "ParamSpec")
      .def_readonly("name", &ParamSpec::name)
      .def_property_readonly("integer", [](const ParamSpec& s) { return s.kind == ParamKind::Integer; })
      .def_property_readonly("log2", [](const ParamSpec& s) { return s.scale == Scale::Log2; })
      .def_readonly("lower", &ParamSpec::lower)
      .def_readonly("upper", &ParamSpec::upper)
      .def_readonly("default", &ParamSpec::default_value)
      .def_readonly("rule", &ParamSpec::rule);

  py::class_<HyperparamSpace>(m, "HyperparamSpace")
      .def_property_readonly("model", [](const HyperparamSpace& s) { return std::string(model_name(s.model)); })
      .def_readonly("params", &HyperparamSpace::params)
      .def("names", &HyperparamSpace::names)
      .def("default_config", &HyperparamSpace::default_config)
      .def("validate", &HyperparamSpace::validate);

  m.def("space_for", [](const std::string& model, std::size_t n, std::size_t p) {
    return space_for(model_arg(model), n, p);
  }, py::arg("model"), py::arg("n"), py::arg("p"));
  m.def("space_for_dataset", [](const std::string& model, const Dataset& train) {
    return space_for(model_arg(model), train);
  }, py::arg("model"), py::arg("train"));
  m.def("sample_full", &sample_full, py::arg("space"), py::arg("count"), py::arg("seed"));
  m.def("marginal_grid", &marginal_grid, py::arg("space"), py::arg("param"), py::arg("points"));
  m.def("pairwise_grid", &pairwise_grid, py::arg("space"), py::arg("h1"), py::arg("h2"), py::arg("points"));

  py::class_<PredictionEntry>(m, "PredictionEntry")
      .def(py::init([](const Config& c, const Labels& labels, bool failed, const std::string& message) {
             return PredictionEntry{c, labels, failed, false, message};
           }),
           py::arg("config"), py::arg("labels"), py::arg("failed") = false, py::arg("message") = "")
      .def_readonly("config", &PredictionEntry::config)
      .def_readonly("labels", &PredictionEntry::labels)
      .def_readonly("failed", &PredictionEntry::failed)
      .def_readonly("warning", &PredictionEntry::warning)
      .def_readonly("message", &PredictionEntry::message);

  py::class_<PredictionSet>(m, "PredictionSet")
      .def(py::init([](const std::string& dataset_id, const std::string& model, const Labels& eval_labels,
                       const std::vector<PredictionEntry>& entries, Label positive_label) {
             PredictionSet ps;
             ps.dataset_id = dataset_id;
             ps.model = model_arg(model);
             ps.eval_labels = eval_labels;
             ps.entries = entries;
             ps.positive_label = positive_label;
             ps.validate();
             return ps;
           }),
           py::arg("dataset_id"), py::arg("model"), py::arg("eval_labels"), py::arg("entries"),
           py::arg("positive_label") = 1)
      .def_readonly("dataset_id", &PredictionSet::dataset_id)
      .def_property_readonly("model", [](const PredictionSet& ps) { return std::string(model_name(ps.model)); })
      .def_readonly("positive_label", &PredictionSet::positive_label)
      .def_readonly("eval_labels", &PredictionSet::eval_labels)
      .def_readonly("entries", &PredictionSet::entries)
      .def_readonly("default_entry", &PredictionSet::default_entry)
      .def(py::self == py::self);

  m.def(
      "run_sweep",
      [](const std::string& model, const std::vector<Config>& configs, const Dataset& train, const Dataset& eval,
         std::uint64_t seed, std::size_t jobs) {
        py::gil_scoped_release release;
        return run_sweep(model_arg(model), configs, train, eval, seed, {jobs});
      },
      py::arg("model"), py::arg("configs"), py::arg("train"), py::arg("eval"), py::arg("seed") = 0,
      py::arg("jobs") = 1);

  py::class_<DiscrepancyResult>(m, "DiscrepancyResult")
      .def_readonly("value", &DiscrepancyResult::value)
      .def_readonly("disagreements", &DiscrepancyResult::disagreements)
      .def_readonly("n", &DiscrepancyResult::n)
      .def_readonly("argmax_config", &DiscrepancyResult::argmax_config)
      .def_readonly("dataset_id", &DiscrepancyResult::dataset_id)
      .def_property_readonly("scope", [](const DiscrepancyResult& r) { return r.scope.to_string(); });

  py::class_<TunabilityResult>(m, "TunabilityResult")
      .def_readonly("value", &TunabilityResult::value)
      .def_readonly("default_f1", &TunabilityResult::default_f1)
      .def_readonly("best_f1", &TunabilityResult::best_f1)
      .def_readonly("best_config", &TunabilityResult::best_config)
      .def_property_readonly("scope", [](const TunabilityResult& r) { return r.scope.to_string(); });

  m.def("disagreement", [](const Labels& a, const Labels& b) { return disagreement(a, b); });
  m.def("f1", [](const Labels& pred, const Labels& truth, Label positive) { return f1(pred, truth, positive); },
        py::arg("pred"), py::arg("truth"), py::arg("positive") = 1);
  m.def("model_discrepancy", &model_discrepancy);
  m.def("marginal_discrepancy", &marginal_discrepancy);
  m.def("joint_discrepancy", &joint_discrepancy);
  m.def(
      "tunability",
      [](const PredictionSet& ps, const std::string& scope, const std::vector<std::string>& params) {
        return tunability(ps, scope_arg(scope, params));
      },
      py::arg("ps"), py::arg("scope") = "model", py::arg("params") = std::vector<std::string>{});
  m.def("restrict_to", &restrict_to);
  m.def("marginal_params", &marginal_params);
  m.def("aggregate", [](const std::vector<double>& values) {
    const auto s = aggregate(values);
    py::dict d;
    d["count"] = s.count;
    d["mean"] = s.mean;
    d["std"] = s.std ? py::cast(*s.std) : py::none();
    d["median"] = s.median;
    d["min"] = s.min;
    d["max"] = s.max;
    return d;
  });
  m.def(
      "format_mean_std",
      [](double mean, std::optional<double> std) {
        AggregateStat s;
        s.mean = mean;
        s.std = std;
        return format_mean_std(s);
      },
      py::arg("mean"), py::arg("std") = py::none());
  m.def("equal_range_bins", [](const std::vector<double>& v, int bins) { return equal_range_bins(v, bins); },
        py::arg("values"), py::arg("bins") = 3);

  m.def("export_predictions", py::overload_cast<const PredictionSet&>(&export_predictions));
  m.def("import_predictions",
        [](const std::string& text) { return import_predictions(text); });
  m.def("import_predictions_file",
        [](const std::filesystem::path& path) { return import_predictions_file(path); });

  m.def(
      "_sweep",
      [](const std::filesystem::path& config, const std::filesystem::path& out, bool force, std::size_t jobs) {
        auto c = load_sweep_config(config);
        py::gil_scoped_release release;
        return cmd_sweep(c, output_arg(out, force, jobs));
      },
      py::arg("config"), py::arg("out"), py::arg("force"), py::arg("jobs"));
  m.def(
      "_marginal",
      [](const std::string& model, const std::string& param, std::size_t points,
         const std::vector<std::filesystem::path>& data, const std::string& target,
         const std::optional<std::string>& positive, std::uint64_t seed, double split_fraction,
         const std::string& eval_on, const std::string& impute, const std::filesystem::path& out, bool force,
         std::size_t jobs) {
        py::gil_scoped_release release;
        return cmd_marginal(model_arg(model), param, points, specs_arg(data, target, positive),
                            settings_arg(seed, split_fraction, eval_on, impute, std::nullopt),
                            output_arg(out, force, jobs));
      });
  m.def(
      "_joint",
      [](const std::string& model, const std::string& h1, const std::string& h2, std::size_t points,
         const std::vector<std::filesystem::path>& data, const std::string& target,
         const std::optional<std::string>& positive, std::uint64_t seed, double split_fraction,
         const std::string& eval_on, const std::string& impute, std::optional<std::size_t> axis_bins,
         const std::filesystem::path& out, bool force, std::size_t jobs) {
        py::gil_scoped_release release;
        return cmd_joint(model_arg(model), h1, h2, points, specs_arg(data, target, positive),
                         settings_arg(seed, split_fraction, eval_on, impute, axis_bins),
                         output_arg(out, force, jobs));
      });
  m.def("_import", [](const std::vector<std::filesystem::path>& files, const std::filesystem::path& out, bool force) {
    py::gil_scoped_release release;
    return cmd_import(files, output_arg(out, force, 1));
  });

  py::class_<RunOutcome>(m, "_RunOutcome")
      .def_readonly("exit_code", &RunOutcome::exit_code)
      .def_readonly("failed_configs", &RunOutcome::failed_configs)
      .def_property_readonly("report_json", [](const RunOutcome& o) { return to_json(o.report).dump(); })
      .def_readonly("files", &RunOutcome::files);
}

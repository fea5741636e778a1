#include "hypermult/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hypermult/error.hpp"

namespace hypermult {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_fixed4(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 4);
  std::string out(buf, ptr);
  if (out == "-0.0000") out = "0.0000";
  return out;
}

std::string format_mean_std(const AggregateStat& stat) {
  std::string out = format_fixed4(stat.mean);
  if (stat.std) out += " ± " + format_fixed4(*stat.std);
  return out;
}

std::vector<SummaryRow> summary_table(std::span<const DatasetResult> results) {
  std::map<int, std::vector<const DatasetResult*>> by_model;
  for (const auto& r : results) {
    if (r.discrepancy.scope.kind != Scope::Kind::Model) continue;
    by_model[static_cast<int>(r.discrepancy.model)].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [model, list] : by_model) {
    SummaryRow row;
    row.model = static_cast<ModelKind>(model);
    std::vector<double> disc;
    std::vector<double> tune;
    for (const DatasetResult* r : list) {
      disc.push_back(r->discrepancy.value);
      tune.push_back(r->tunability.value);
      row.datasets.push_back(r->discrepancy.dataset_id);
    }
    row.discrepancy = aggregate(disc);
    row.tunability = aggregate(tune);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> equal_range_breaks(std::span<const double> values, int bins) {
  if (values.empty()) throw Error(ErrorCode::Empty, "binning over no values");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "binning a non-finite value");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> breaks;
  if (!(hi > lo)) return breaks;
  const double width = (hi - lo) / bins;
  for (int k = 1; k < bins; ++k) breaks.push_back(lo + k * width);
  return breaks;
}

std::vector<int> equal_range_bins(std::span<const double> values, int bins) {
  const auto breaks = equal_range_breaks(values, bins);
  std::vector<int> out(values.size(), 0);
  if (breaks.empty()) return out;
  const double hi = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int b = 0;
    for (double br : breaks) b += values[i] >= br;
    out[i] = values[i] == hi ? bins - 1 : b;
  }
  return out;
}

std::vector<BivariateCell> bivariate_grid(std::span<const RegionCell> cells) {
  std::vector<const RegionCell*> filled;
  for (const auto& c : cells) {
    if (c.mean_f1 && c.mean_discrepancy) filled.push_back(&c);
  }
  if (filled.empty()) throw Error(ErrorCode::Empty, "bivariate grid needs at least one non-empty cell");
  std::vector<double> f1s;
  std::vector<double> discs;
  for (const RegionCell* c : filled) {
    f1s.push_back(*c->mean_f1);
    discs.push_back(*c->mean_discrepancy);
  }
  const auto f1_bins = equal_range_bins(f1s, 3);
  const auto disc_bins = equal_range_bins(discs, 3);
  std::vector<BivariateCell> out;
  for (std::size_t i = 0; i < filled.size(); ++i) {
    out.push_back({filled[i]->h1_range, filled[i]->h2_range, filled[i]->members, f1s[i], discs[i],
                   f1_bins[i], disc_bins[i]});
  }
  return out;
}

std::size_t axis_region(const ParamSpec& spec, double v, std::size_t axis_bins) {
  if (axis_bins == 0) throw Error(ErrorCode::InvalidConfig, "axis_bins must be positive");
  const double lo = spec.to_axis(spec.lower);
  const double hi = spec.to_axis(spec.upper);
  if (!(hi > lo)) return 0;
  if (spec.scale == Scale::Log2 && !(v > 0.0)) return 0;
  const double t = (spec.to_axis(v) - lo) / (hi - lo);
  const double idx = std::floor(t * static_cast<double>(axis_bins));
  if (!(idx > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(idx), axis_bins - 1);
}

Interval axis_interval(const ParamSpec& spec, std::size_t index, std::size_t axis_bins) {
  const double lo = spec.to_axis(spec.lower);
  const double hi = spec.to_axis(spec.upper);
  const double w = (hi - lo) / static_cast<double>(axis_bins);
  Interval out{spec.from_axis(lo + w * static_cast<double>(index)),
               spec.from_axis(lo + w * static_cast<double>(index + 1))};
  if (index == 0) out.lo = spec.lower;
  if (index + 1 == axis_bins) out.hi = spec.upper;
  return out;
}

std::vector<RegionCell> region_cells(std::span<const PredictionSet> sets, const ParamSpec& h1,
                                     const ParamSpec& h2, std::size_t axis_bins) {
  if (axis_bins == 0) throw Error(ErrorCode::InvalidConfig, "axis_bins must be positive");
  std::vector<double> f1_sum(axis_bins * axis_bins, 0.0);
  std::vector<double> disc_sum(axis_bins * axis_bins, 0.0);
  std::vector<std::size_t> members(axis_bins * axis_bins, 0);

  for (const auto& ps : sets) {
    const Config& def = ps.default_prediction().config;
    const auto& base = ps.default_prediction().labels;
    for (const auto& e : ps.entries) {
      for (const auto& name : e.config.differing(def)) {
        if (name != h1.name && name != h2.name) {
          throw Error(ErrorCode::NotPairwise, ps.dataset_id + ": config " + e.config.id() +
                                                  " varies '" + name + "'");
        }
      }
      if (e.failed) continue;
      const std::size_t r = axis_region(h1, e.config.at(h1.name), axis_bins) * axis_bins +
                            axis_region(h2, e.config.at(h2.name), axis_bins);
      f1_sum[r] += f1(e.labels, ps.eval_labels, ps.positive_label);
      disc_sum[r] += disagreement(e.labels, base);
      members[r] += 1;
    }
  }

  std::vector<RegionCell> cells;
  cells.reserve(axis_bins * axis_bins);
  for (std::size_t i = 0; i < axis_bins; ++i) {
    for (std::size_t j = 0; j < axis_bins; ++j) {
      const std::size_t r = i * axis_bins + j;
      RegionCell cell;
      cell.h1_range = axis_interval(h1, i, axis_bins);
      cell.h2_range = axis_interval(h2, j, axis_bins);
      cell.members = members[r];
      if (members[r] > 0) {
        cell.mean_f1 = f1_sum[r] / static_cast<double>(members[r]);
        cell.mean_discrepancy = disc_sum[r] / static_cast<double>(members[r]);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

BivariatePanel make_panel(ModelKind model, const ParamSpec& h1, const ParamSpec& h2,
                          std::span<const PredictionSet> sets, std::size_t axis_bins) {
  BivariatePanel panel;
  panel.model = model;
  panel.h1 = h1.name;
  panel.h2 = h2.name;
  panel.axis_bins = axis_bins;
  panel.regions = region_cells(sets, h1, h2, axis_bins);
  panel.cells = bivariate_grid(panel.regions);
  return panel;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using ojson = nlohmann::ordered_json;

ojson config_json(const Config& c) {
  ojson values = ojson::object();
  for (const auto& [k, v] : c.values()) values[k] = v;
  return ojson{{"id", c.id()}, {"values", values}};
}

ojson stat_json(const AggregateStat& s) {
  ojson j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  if (s.std) j["std"] = *s.std;
  j["median"] = s.median;
  j["min"] = s.min;
  j["max"] = s.max;
  j["text"] = format_mean_std(s);
  return j;
}

ojson discrepancy_json(const DiscrepancyResult& d) {
  return ojson{{"statistic", "max"},
               {"value", d.value},
               {"disagreements", d.disagreements},
               {"n_eval", d.n},
               {"argmax_config", config_json(d.argmax_config)}};
}

ojson tunability_json(const TunabilityResult& t) {
  return ojson{{"value", t.value},
               {"default_f1", t.default_f1},
               {"best_f1", t.best_f1},
               {"best_config", config_json(t.best_config)}};
}

ojson dataset_result_json(const DatasetResult& r) {
  ojson j;
  j["dataset_id"] = r.discrepancy.dataset_id;
  j["model"] = model_name(r.discrepancy.model);
  j["scope"] = r.discrepancy.scope.to_string();
  j["discrepancy"] = discrepancy_json(r.discrepancy);
  j["tunability"] = tunability_json(r.tunability);
  j["n_configs"] = r.n_configs;
  if (!r.failed_configs.empty()) j["failed_configs"] = r.failed_configs;
  if (r.warnings) j["warnings"] = r.warnings;
  return j;
}

ojson interval_json(const Interval& i) { return ojson::array({i.lo, i.hi}); }

}  // namespace

nlohmann::ordered_json to_json(const Report& report) {
  ojson root;
  {
    const ReportMeta& m = report.meta;
    ojson meta;
    meta["schema_version"] = kReportSchemaVersion;
    meta["tool_version"] = m.tool_version;
    meta["command"] = m.command;
    meta["seed"] = m.seed;
    meta["split_fraction"] = m.split_fraction;
    meta["eval_on"] = m.eval_on;
    meta["impute"] = m.impute;
    ojson datasets = ojson::array();
    for (const auto& d : m.datasets) {
      ojson dj;
      dj["id"] = d.id;
      if (!d.source.empty()) dj["source"] = d.source;
      if (!d.fingerprint.empty()) dj["fingerprint"] = d.fingerprint;
      dj["n"] = d.n;
      dj["p"] = d.p;
      dj["n_train"] = d.n_train;
      dj["n_eval"] = d.n_eval;
      if (!d.positive_label.empty()) dj["positive_label"] = d.positive_label;
      datasets.push_back(dj);
    }
    if (!datasets.empty()) meta["datasets"] = datasets;
    if (!m.timestamp.empty()) meta["timestamp"] = m.timestamp;
    root["meta"] = meta;
  }
  if (!report.summary.empty()) {
    ojson rows = ojson::array();
    for (const auto& row : report.summary) {
      rows.push_back(ojson{{"model", model_name(row.model)},
                           {"datasets", row.datasets},
                           {"discrepancy", stat_json(row.discrepancy)},
                           {"tunability", stat_json(row.tunability)}});
    }
    root["summary"] = rows;
  }
  if (!report.per_dataset.empty()) {
    ojson rows = ojson::array();
    for (const auto& r : report.per_dataset) rows.push_back(dataset_result_json(r));
    root["per_dataset"] = rows;
  }
  if (!report.marginal.empty()) {
    ojson groups = ojson::array();
    for (const auto& g : report.marginal) {
      ojson results = ojson::array();
      for (const auto& r : g.results) results.push_back(dataset_result_json(r));
      groups.push_back(ojson{{"model", model_name(g.model)},
                             {"param", g.param},
                             {"discrepancy", stat_json(g.discrepancy)},
                             {"tunability", stat_json(g.tunability)},
                             {"results", results}});
    }
    root["marginal"] = groups;
  }
  if (!report.joint.empty()) {
    ojson groups = ojson::array();
    for (const auto& g : report.joint) {
      ojson results = ojson::array();
      for (const auto& r : g.results) {
        ojson rj = dataset_result_json(r.joint);
        if (r.marginal_h1) rj["marginal_h1"] = discrepancy_json(*r.marginal_h1);
        if (r.marginal_h2) rj["marginal_h2"] = discrepancy_json(*r.marginal_h2);
        results.push_back(rj);
      }
      groups.push_back(ojson{{"model", model_name(g.model)},
                             {"h1", g.h1},
                             {"h2", g.h2},
                             {"discrepancy", stat_json(g.discrepancy)},
                             {"results", results}});
    }
    root["joint"] = groups;
  }
  if (!report.bivariate.empty()) {
    ojson panels = ojson::array();
    for (const auto& p : report.bivariate) {
      ojson regions = ojson::array();
      std::size_t next_cell = 0;
      for (const auto& r : p.regions) {
        ojson rj;
        rj["h1_range"] = interval_json(r.h1_range);
        rj["h2_range"] = interval_json(r.h2_range);
        rj["members"] = r.members;
        if (r.mean_f1) {
          const BivariateCell& c = p.cells.at(next_cell++);
          rj["mean_f1"] = c.mean_f1;
          rj["mean_discrepancy"] = c.mean_discrepancy;
          rj["f1_bin"] = c.f1_bin;
          rj["disc_bin"] = c.disc_bin;
        } else {
          rj["empty"] = true;
        }
        regions.push_back(rj);
      }
      panels.push_back(ojson{{"model", model_name(p.model)},
                             {"h1", p.h1},
                             {"h2", p.h2},
                             {"axis_bins", p.axis_bins},
                             {"statistic", "mean"},
                             {"binning", "equal-range 3x3"},
                             {"regions", regions}});
    }
    root["bivariate"] = panels;
  }
  return root;
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw Error(ErrorCode::SchemaError, "csv row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::size_t width_;
  std::ostringstream out_;
};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_file(const std::filesystem::path& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorCode::IoError, path.string() + " exists; pass --force to overwrite");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void add_result_row(CsvWriter& w, const DatasetResult& r) {
  std::vector<std::string> row{r.discrepancy.dataset_id,
                               std::string(model_name(r.discrepancy.model)),
                               r.discrepancy.scope.to_string(),
                               format_double(r.discrepancy.value),
                               std::to_string(r.discrepancy.disagreements),
                               std::to_string(r.discrepancy.n),
                               r.discrepancy.argmax_config.id(),
                               format_double(r.tunability.value),
                               format_double(r.tunability.default_f1),
                               format_double(r.tunability.best_f1),
                               r.tunability.best_config.id(),
                               std::to_string(r.n_configs),
                               std::to_string(r.failed_configs.size())};
  w.row(row);
}

const std::vector<std::string> kResultHeader{
    "dataset_id", "model",      "scope",          "discrepancy", "disagreements",
    "n_eval",     "argmax_config_id", "tunability", "default_f1",  "best_f1",
    "best_config_id", "n_configs", "n_failed"};

}  // namespace

std::vector<std::filesystem::path> emit(const Report& report, ReportFormat format,
                                        const std::filesystem::path& path, bool force) {
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::Json) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file(path, to_json(report).dump(2) + "\n", force);
    written.push_back(path);
    return written;
  }

  std::filesystem::create_directories(path);
  std::vector<std::pair<std::string, std::string>> files;
  if (!report.summary.empty()) {
    CsvWriter w({"model", "m", "discrepancy_mean", "discrepancy_std", "discrepancy_median",
                 "discrepancy_min", "discrepancy_max", "tunability_mean", "tunability_std",
                 "tunability_median", "tunability_min", "tunability_max", "discrepancy_text",
                 "tunability_text"});
    for (const auto& row : report.summary) {
      const auto& d = row.discrepancy;
      const auto& t = row.tunability;
      w.row({std::string(model_name(row.model)), std::to_string(d.count), format_double(d.mean),
             opt(d.std), format_double(d.median), format_double(d.min), format_double(d.max),
             format_double(t.mean), opt(t.std), format_double(t.median), format_double(t.min),
             format_double(t.max), format_mean_std(d), format_mean_std(t)});
    }
    files.emplace_back("summary.csv", w.str());
  }
  if (!report.per_dataset.empty()) {
    CsvWriter w(kResultHeader);
    for (const auto& r : report.per_dataset) add_result_row(w, r);
    files.emplace_back("per_dataset.csv", w.str());
  }
  if (!report.marginal.empty()) {
    CsvWriter w(kResultHeader);
    for (const auto& g : report.marginal) {
      for (const auto& r : g.results) add_result_row(w, r);
    }
    files.emplace_back("marginal.csv", w.str());
  }
  if (!report.joint.empty()) {
    auto header = kResultHeader;
    header.insert(header.end(), {"marginal_h1", "marginal_h2"});
    CsvWriter w(header);
    for (const auto& g : report.joint) {
      for (const auto& r : g.results) {
        const auto& d = r.joint.discrepancy;
        const auto& t = r.joint.tunability;
        w.row({d.dataset_id, std::string(model_name(d.model)), d.scope.to_string(),
               format_double(d.value), std::to_string(d.disagreements), std::to_string(d.n),
               d.argmax_config.id(), format_double(t.value), format_double(t.default_f1),
               format_double(t.best_f1), t.best_config.id(), std::to_string(r.joint.n_configs),
               std::to_string(r.joint.failed_configs.size()),
               r.marginal_h1 ? format_double(r.marginal_h1->value) : std::string(),
               r.marginal_h2 ? format_double(r.marginal_h2->value) : std::string()});
      }
    }
    files.emplace_back("joint.csv", w.str());
  }
  if (!report.bivariate.empty()) {
    CsvWriter w({"model", "h1", "h2", "h1_lo", "h1_hi", "h2_lo", "h2_hi", "members", "mean_f1",
                 "mean_discrepancy", "f1_bin", "disc_bin"});
    for (const auto& p : report.bivariate) {
      std::size_t next_cell = 0;
      for (const auto& r : p.regions) {
        std::string f1_bin;
        std::string disc_bin;
        if (r.mean_f1) {
          const BivariateCell& c = p.cells.at(next_cell++);
          f1_bin = std::to_string(c.f1_bin);
          disc_bin = std::to_string(c.disc_bin);
        }
        w.row({std::string(model_name(p.model)), p.h1, p.h2, format_double(r.h1_range.lo),
               format_double(r.h1_range.hi), format_double(r.h2_range.lo),
               format_double(r.h2_range.hi), std::to_string(r.members), opt(r.mean_f1),
               opt(r.mean_discrepancy), f1_bin, disc_bin});
      }
    }
    files.emplace_back("bivariate.csv", w.str());
  }
  if (!force) {
    for (const auto& [name, _] : files) {
      if (std::filesystem::exists(path / name)) {
        throw Error(ErrorCode::IoError, (path / name).string() + " exists; pass --force to overwrite");
      }
    }
  }
  for (const auto& [name, content] : files) {
    write_file(path / name, content, true);
    written.push_back(path / name);
  }
  return written;
}

}  // namespace hypermult

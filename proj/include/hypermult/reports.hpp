#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermult/metrics.hpp"
#include "hypermult/spaces.hpp"

namespace hypermult {

/// Per (dataset, model, scope) outcome of one sweep.
struct DatasetResult {
  DiscrepancyResult discrepancy;
  TunabilityResult tunability;
  std::size_t n_configs = 0;
  std::vector<std::string> failed_configs;
  std::size_t warnings = 0;
};

struct SummaryRow {
  ModelKind model = ModelKind::KNN;
  AggregateStat discrepancy;
  AggregateStat tunability;
  std::vector<std::string> datasets;
};

/// "0.2020 ± 0.2170"; the mean alone when std is absent.
std::string format_mean_std(const AggregateStat& stat);
std::string format_fixed4(double value);

/// One row per model present in `results` (model-scope entries only), in
/// model order; each row aggregates its own dataset list.
std::vector<SummaryRow> summary_table(std::span<const DatasetResult> results);

struct MarginalGroup {
  ModelKind model = ModelKind::KNN;
  std::string param;
  std::vector<DatasetResult> results;
  AggregateStat discrepancy;
  AggregateStat tunability;
};

struct JointDatasetResult {
  DatasetResult joint;
  std::optional<DiscrepancyResult> marginal_h1;
  std::optional<DiscrepancyResult> marginal_h2;
};

struct JointGroup {
  ModelKind model = ModelKind::KNN;
  std::string h1;
  std::string h2;
  std::vector<JointDatasetResult> results;
  AggregateStat discrepancy;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

/// Mean F1 and mean disagreement-vs-default of the configs falling in one
/// rectangle of a two-parameter panel. Both means are absent for an empty
/// region.
struct RegionCell {
  Interval h1_range;
  Interval h2_range;
  std::size_t members = 0;
  std::optional<double> mean_f1;
  std::optional<double> mean_discrepancy;
};

struct BivariateCell {
  Interval h1_range;
  Interval h2_range;
  std::size_t members = 0;
  double mean_f1 = 0.0;
  double mean_discrepancy = 0.0;
  int f1_bin = 0;
  int disc_bin = 0;
};

/// Equal-range binning into `bins` classes over the observed [min, max].
/// Values on a break point go to the upper class, the maximum to the top
/// class, and an all-equal input to class 0. NonFinite on NaN/inf.
std::vector<int> equal_range_bins(std::span<const double> values, int bins = 3);
/// The bins - 1 interior break points (empty for a degenerate range).
std::vector<double> equal_range_breaks(std::span<const double> values, int bins = 3);

/// Three-by-three classification of non-empty regions on (mean F1, mean
/// discrepancy); empty regions are skipped.
std::vector<BivariateCell> bivariate_grid(std::span<const RegionCell> cells);

/// Index of the axis_bins-wide partition of [spec.lower, spec.upper] (on the
/// parameter's own scale) holding v. Out-of-range values, and zero on a log2
/// axis, clamp to the edge region.
std::size_t axis_region(const ParamSpec& spec, double v, std::size_t axis_bins);
Interval axis_interval(const ParamSpec& spec, std::size_t index, std::size_t axis_bins);

/// Partitions the (h1, h2) plane into axis_bins x axis_bins regions and
/// averages, per region, F1 and disagreement with the default over every
/// non-failed config of every set (default included). Regions are ordered
/// h1-major. NotPairwise if a set varies other parameters.
inline constexpr std::size_t kDefaultAxisBins = 10;

std::vector<RegionCell> region_cells(std::span<const PredictionSet> sets, const ParamSpec& h1,
                                     const ParamSpec& h2, std::size_t axis_bins = kDefaultAxisBins);

struct BivariatePanel {
  ModelKind model = ModelKind::KNN;
  std::string h1;
  std::string h2;
  std::size_t axis_bins = kDefaultAxisBins;
  std::vector<RegionCell> regions;
  std::vector<BivariateCell> cells;
};

BivariatePanel make_panel(ModelKind model, const ParamSpec& h1, const ParamSpec& h2,
                          std::span<const PredictionSet> sets,
                          std::size_t axis_bins = kDefaultAxisBins);

struct DatasetMeta {
  std::string id;
  std::string source;
  std::string fingerprint;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  std::string positive_label;
};

struct ReportMeta {
  std::string tool_version;
  std::string command;
  std::uint64_t seed = 0;
  double split_fraction = 0.3;
  std::string eval_on = "holdout";
  std::string impute = "reject";
  std::vector<DatasetMeta> datasets;
  /// Wall-clock creation time; the only non-reproducible field.
  std::string timestamp;
};

struct Report {
  ReportMeta meta;
  std::vector<SummaryRow> summary;
  std::vector<DatasetResult> per_dataset;
  std::vector<MarginalGroup> marginal;
  std::vector<JointGroup> joint;
  std::vector<BivariatePanel> bivariate;
};

inline constexpr int kReportSchemaVersion = 1;

/// Stable key order; sections with no content are omitted.
nlohmann::ordered_json to_json(const Report& report);

enum class ReportFormat { Json, Csv };

/// Json writes one file at `path`. Csv treats `path` as a directory and
/// writes one file per non-empty section (summary.csv, per_dataset.csv,
/// marginal.csv, joint.csv, bivariate.csv). Existing files are only
/// replaced when `force` is set; otherwise IoError.
std::vector<std::filesystem::path> emit(const Report& report, ReportFormat format,
                                        const std::filesystem::path& path, bool force = false);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace hypermult

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hypermult/datasets.hpp"
#include "hypermult/reports.hpp"
#include "hypermult/spaces.hpp"

namespace hypermult {

inline constexpr const char* kToolVersion = "0.3.0";

struct DatasetSpec {
  std::filesystem::path path;
  std::string target;
  std::optional<std::string> positive;
  std::optional<std::string> id;
};

struct JointPlan {
  std::string h1;
  std::string h2;
  std::size_t points = 5;
};

struct ModelPlan {
  ModelKind model = ModelKind::KNN;
  /// Sampled configs for the full sweep (the default is added on top).
  std::size_t count = 50;
  /// Marginal sweeps: parameter name -> grid points.
  std::vector<std::pair<std::string, std::size_t>> marginal;
  std::vector<JointPlan> joint;
};

enum class EvalOn { Holdout, Train };

struct RunSettings {
  std::uint64_t seed = 0;
  double split_fraction = 0.3;
  EvalOn eval_on = EvalOn::Holdout;
  Impute impute = Impute::Reject;
  /// Regions per axis of a joint panel; unset means one per grid point.
  std::optional<std::size_t> axis_bins;
};

/// Declarative sweep description, read from JSON:
///
///   {
///     "seed": 7, "split_fraction": 0.3, "eval_on": "holdout",
///     "impute": "reject",
///     "datasets": ["a.csv", {"path": "b.csv", "target": "y", "positive": "1"}],
///     "models": [{"model": "knn", "count": 50, "marginal": {"k": 30},
///                 "joint": [{"h1": "cp", "h2": "maxdepth", "points": 5}]}]
///   }
///
/// Relative dataset paths resolve against the config file's directory.
struct SweepConfig {
  RunSettings settings;
  std::vector<DatasetSpec> datasets;
  std::vector<ModelPlan> models;
};

SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct OutputOptions {
  std::filesystem::path out_dir;
  bool force = false;
  std::size_t jobs = 1;
  /// Progress sink; nullptr silences progress.
  std::ostream* log = nullptr;
  /// Echoed into meta/manifest.
  std::string command_line;
  /// Leave the timestamp out of meta and manifest (tests).
  bool omit_timestamps = false;
};

struct RunOutcome {
  Report report;
  /// 0 success, 2 when some configs failed (reports still written).
  int exit_code = 0;
  std::size_t failed_configs = 0;
  std::vector<std::filesystem::path> files;
};

/// Full pipeline: load, split, sweep every model plan on every dataset,
/// score, and write report.json, csv/, predictions/ and manifest.json.
RunOutcome cmd_sweep(const SweepConfig& config, const OutputOptions& output);

/// Marginal grid of one hyperparameter on each dataset.
RunOutcome cmd_marginal(ModelKind model, const std::string& param, std::size_t points,
                        const std::vector<DatasetSpec>& datasets, const RunSettings& settings,
                        const OutputOptions& output);

/// Pairwise grid of two hyperparameters, with the region panel.
RunOutcome cmd_joint(ModelKind model, const std::string& h1, const std::string& h2,
                     std::size_t points, const std::vector<DatasetSpec>& datasets,
                     const RunSettings& settings, const OutputOptions& output);

/// Model-scope metrics plus a marginal group for every parameter that some
/// entry varies alone, for externally produced prediction files.
RunOutcome cmd_import(const std::vector<std::filesystem::path>& files, const OutputOptions& output);

std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace hypermult

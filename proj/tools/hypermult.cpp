// hypermult: hyperparameter multiplicity sweeps and reports.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypermult/error.hpp"
#include "hypermult/pipeline.hpp"

namespace hm = hypermult;

namespace {

struct DataFlags {
  std::vector<std::string> paths;
  std::string target;
  std::string positive;
};

struct SettingFlags {
  std::uint64_t seed = 0;
  double split_fraction = 0.3;
  std::string eval_on = "holdout";
  std::string impute = "reject";
  std::optional<std::size_t> axis_bins;
};

void add_data_flags(CLI::App* app, DataFlags& data) {
  app->add_option("--data", data.paths, "CSV dataset (repeatable)")->required();
  app->add_option("--target", data.target, "Target column name or 0-based index (default: last)");
  app->add_option("--positive", data.positive, "Target value treated as positive (default: minority)");
}

void add_setting_flags(CLI::App* app, SettingFlags& s, bool with_bins) {
  app->add_option("--seed", s.seed, "Root seed");
  app->add_option("--split-fraction", s.split_fraction, "Evaluation fraction")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--eval-on", s.eval_on, "Evaluate on the held-out split or the training split")
      ->check(CLI::IsMember({"holdout", "train"}));
  app->add_option("--impute", s.impute, "Missing values: reject or mean")
      ->check(CLI::IsMember({"reject", "mean"}));
  if (with_bins) {
    app->add_option("--axis-bins", s.axis_bins, "Regions per axis in the panel (default: --points)")
        ->check(CLI::PositiveNumber);
  }
}

void add_output_flags(CLI::App* app, hm::OutputOptions& out, std::string& dir) {
  app->add_option("--out", dir, "Output directory")->required();
  app->add_flag("--force", out.force, "Overwrite an existing report");
  app->add_option("--jobs", out.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

hm::RunSettings to_settings(const SettingFlags& s) {
  hm::RunSettings r;
  r.seed = s.seed;
  r.split_fraction = s.split_fraction;
  r.eval_on = s.eval_on == "train" ? hm::EvalOn::Train : hm::EvalOn::Holdout;
  r.impute = s.impute == "mean" ? hm::Impute::Mean : hm::Impute::Reject;
  r.axis_bins = s.axis_bins;
  return r;
}

std::vector<hm::DatasetSpec> to_specs(const DataFlags& data) {
  std::vector<hm::DatasetSpec> out;
  for (const auto& p : data.paths) {
    hm::DatasetSpec spec;
    spec.path = p;
    spec.target = data.target;
    if (!data.positive.empty()) spec.positive = data.positive;
    out.push_back(std::move(spec));
  }
  return out;
}

hm::ModelKind trainable_model(const std::string& name) {
  const auto kind = hm::parse_model(name);
  if (!hm::has_builtin_trainer(kind)) {
    throw hm::Error(hm::ErrorCode::UnknownModel,
                    "svm has no built-in trainer; export its predictions and use `hypermult import`");
  }
  return kind;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperparameter multiplicity: prediction discrepancy and tunability"};
  app.set_version_flag("--version", hm::kToolVersion);
  app.require_subcommand(1);

  hm::OutputOptions output;
  output.log = &std::cerr;
  std::string out_dir;
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);
  output.command_line = command_line;

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the sweeps described by a JSON config");
  std::string config_path;
  sweep->add_option("--config", config_path, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  std::vector<std::string> extra_data;
  sweep->add_option("--data", extra_data, "Extra CSV dataset (repeatable)");
  std::optional<std::uint64_t> seed_override;
  std::optional<double> fraction_override;
  std::string eval_on_override, impute_override;
  sweep->add_option("--seed", seed_override, "Override the config seed");
  sweep->add_option("--split-fraction", fraction_override, "Override the evaluation fraction")
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--eval-on", eval_on_override, "Override the evaluation split")
      ->check(CLI::IsMember({"holdout", "train"}));
  sweep->add_option("--impute", impute_override, "Override missing-value handling")
      ->check(CLI::IsMember({"reject", "mean"}));
  add_output_flags(sweep, output, out_dir);

  // marginal
  auto* marginal = app.add_subcommand("marginal", "Sweep one hyperparameter with the rest at default");
  DataFlags marginal_data;
  SettingFlags marginal_settings;
  std::string marginal_model, marginal_param;
  std::size_t marginal_points = 10;
  add_data_flags(marginal, marginal_data);
  add_setting_flags(marginal, marginal_settings, false);
  marginal->add_option("--model", marginal_model, "Model family")->required();
  marginal->add_option("--param", marginal_param, "Hyperparameter")->required();
  marginal->add_option("--points", marginal_points, "Grid points")->check(CLI::PositiveNumber);
  add_output_flags(marginal, output, out_dir);

  // joint
  auto* joint = app.add_subcommand("joint", "Sweep two hyperparameters on a grid");
  DataFlags joint_data;
  SettingFlags joint_settings;
  std::string joint_model, h1, h2;
  std::size_t joint_points = 5;
  add_data_flags(joint, joint_data);
  add_setting_flags(joint, joint_settings, true);
  joint->add_option("--model", joint_model, "Model family")->required();
  joint->add_option("--h1", h1, "First hyperparameter")->required();
  joint->add_option("--h2", h2, "Second hyperparameter")->required();
  joint->add_option("--points", joint_points, "Grid points per axis")->check(CLI::PositiveNumber);
  add_output_flags(joint, output, out_dir);

  // import
  auto* import = app.add_subcommand("import", "Score prediction files produced elsewhere");
  std::vector<std::string> files;
  import->add_option("files", files, "Prediction files")->required()->check(CLI::ExistingFile);
  add_output_flags(import, output, out_dir);

  CLI11_PARSE(app, argc, argv);
  output.out_dir = out_dir;

  try {
    hm::RunOutcome outcome;
    if (*sweep) {
      auto config = hm::load_sweep_config(config_path);
      for (const auto& p : extra_data) config.datasets.push_back({p, {}, {}, {}});
      if (seed_override) config.settings.seed = *seed_override;
      if (fraction_override) config.settings.split_fraction = *fraction_override;
      if (!eval_on_override.empty()) {
        config.settings.eval_on = eval_on_override == "train" ? hm::EvalOn::Train : hm::EvalOn::Holdout;
      }
      if (!impute_override.empty()) {
        config.settings.impute = impute_override == "mean" ? hm::Impute::Mean : hm::Impute::Reject;
      }
      outcome = hm::cmd_sweep(config, output);
    } else if (*marginal) {
      outcome = hm::cmd_marginal(trainable_model(marginal_model), marginal_param, marginal_points,
                                 to_specs(marginal_data), to_settings(marginal_settings), output);
    } else if (*joint) {
      outcome = hm::cmd_joint(trainable_model(joint_model), h1, h2, joint_points, to_specs(joint_data),
                              to_settings(joint_settings), output);
    } else {
      std::vector<std::filesystem::path> paths(files.begin(), files.end());
      outcome = hm::cmd_import(paths, output);
    }
    if (outcome.exit_code == 2) {
      std::cerr << "hypermult: finished with " << outcome.failed_configs
                << " failed configs or skipped scopes; see the log above\n";
    }
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "hypermult: error: " << e.what() << '\n';
    return 1;
  }
}

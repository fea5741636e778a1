#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "hypermult/prediction_set.hpp"
#include "hypermult/spaces.hpp"

namespace hypermult {

/// Prediction interchange format, version 1. UTF-8 text, tab separated:
///
///   #hypermult-predictions v1
///   dataset_id      <id>
///   model           <model name>
///   positive_label  <0|1>
///   eval_labels     <comma-separated 0/1 labels>
///   n_train         <rows in the training split>      (optional)
///   n_features      <feature count>                   (optional)
///   config_id  values  default  status  labels  message
///   <one row per config>
///
/// `values` is a JSON object of parameter -> number, `default` is 0 or 1,
/// `status` is ok, warning or failed, `labels` is empty for failed rows and
/// `message` may be empty. A config_id of "-" is computed from the values;
/// any other id must match the computed one.
inline constexpr std::string_view kInterchangeMagic = "#hypermult-predictions v1";

std::string export_predictions(const PredictionSet& ps);
void export_predictions(const PredictionSet& ps, const std::filesystem::path& path);

/// Parses and validates a file. When `expected_space` is given, every
/// non-default, non-failed config must name exactly its parameters within
/// bounds.
/// Errors: SchemaError (with line number), NoDefaultRow, DuplicateDefault,
/// LabelDomainError.
PredictionSet import_predictions(std::string_view text,
                                 const std::optional<HyperparamSpace>& expected_space = std::nullopt);
PredictionSet import_predictions_file(const std::filesystem::path& path,
                                      const std::optional<HyperparamSpace>& expected_space = std::nullopt);

}  // namespace hypermult

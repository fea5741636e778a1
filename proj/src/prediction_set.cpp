#include "hypermult/prediction_set.hpp"

#include "hypermult/error.hpp"

namespace hypermult {

std::size_t PredictionSet::failed_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.failed;
  return n;
}

void PredictionSet::validate() {
  if (eval_labels.empty()) throw Error(ErrorCode::Empty, dataset_id + ": no evaluation labels");
  if (positive_label > 1) throw Error(ErrorCode::LabelDomainError, dataset_id + ": positive label outside {0,1}");
  for (Label y : eval_labels) {
    if (y > 1) throw Error(ErrorCode::LabelDomainError, dataset_id + ": evaluation label outside {0,1}");
  }
  std::size_t defaults = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.config.is_default()) {
      ++defaults;
      default_entry = i;
    }
    if (e.failed) continue;
    if (e.labels.size() != eval_labels.size()) {
      throw Error(ErrorCode::LengthMismatch, dataset_id + ": config " + e.config.id() + " has " +
                                                 std::to_string(e.labels.size()) + " labels, expected " +
                                                 std::to_string(eval_labels.size()));
    }
    for (Label y : e.labels) {
      if (y > 1) {
        throw Error(ErrorCode::LabelDomainError,
                    dataset_id + ": config " + e.config.id() + " predicts a label outside {0,1}");
      }
    }
  }
  if (defaults == 0) throw Error(ErrorCode::NoDefaultRow, dataset_id + ": no default entry");
  if (defaults > 1) throw Error(ErrorCode::DuplicateDefault, dataset_id + ": more than one default entry");
  if (entries[default_entry].failed) {
    throw Error(ErrorCode::SchemaError, dataset_id + ": the default entry is marked failed");
  }
}

}  // namespace hypermult

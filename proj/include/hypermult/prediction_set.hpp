#pragma once

#include <string>
#include <vector>

#include "hypermult/datasets.hpp"
#include "hypermult/spaces.hpp"

namespace hypermult {

struct PredictionEntry {
  Config config;
  /// Hard labels on the evaluation rows; empty when failed.
  Labels labels;
  bool failed = false;
  /// Trainer finished with a warning (elastic net hit its iteration cap).
  bool warning = false;
  std::string message;

  bool operator==(const PredictionEntry&) const = default;
};

/// Predictions of one model family on one dataset's evaluation rows, one
/// entry per configuration, exactly one of them the default.
struct PredictionSet {
  std::string dataset_id;
  ModelKind model = ModelKind::KNN;
  Label positive_label = 1;
  Labels eval_labels;
  std::vector<PredictionEntry> entries;
  std::size_t default_entry = 0;
  /// Training-split shape, 0 when unknown (imported files may omit it).
  std::size_t n_train = 0;
  std::size_t n_features = 0;

  const PredictionEntry& default_prediction() const { return entries.at(default_entry); }
  std::size_t failed_count() const noexcept;

  /// SchemaError / NoDefaultRow / DuplicateDefault / LabelDomainError /
  /// LengthMismatch on any broken invariant; also re-derives default_entry.
  void validate();

  /// Copy keeping the default plus the entries accepted by `keep`.
  template <typename Pred>
  PredictionSet filtered(Pred keep) const {
    PredictionSet out;
    out.dataset_id = dataset_id;
    out.model = model;
    out.positive_label = positive_label;
    out.eval_labels = eval_labels;
    out.n_train = n_train;
    out.n_features = n_features;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i == default_entry) {
        out.default_entry = out.entries.size();
        out.entries.push_back(entries[i]);
      } else if (keep(entries[i])) {
        out.entries.push_back(entries[i]);
      }
    }
    return out;
  }

  bool operator==(const PredictionSet&) const = default;
};

}  // namespace hypermult

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypermult/prediction_set.hpp"

namespace hypermult {

/// Which slice of the configuration set a result is taken over.
struct Scope {
  enum class Kind { Model, Marginal, Joint };
  Kind kind = Kind::Model;
  std::string h1;
  std::string h2;

  static Scope model() { return {}; }
  static Scope marginal(std::string h) { return {Kind::Marginal, std::move(h), {}}; }
  static Scope joint(std::string a, std::string b) { return {Kind::Joint, std::move(a), std::move(b)}; }

  /// "model", "marginal(k)", "joint(cp,maxdepth)".
  std::string to_string() const;
  bool operator==(const Scope&) const = default;
};

struct DiscrepancyResult {
  /// Fraction of evaluation rows where argmax_config disagrees with the default.
  double value = 0.0;
  std::size_t disagreements = 0;
  std::size_t n = 0;
  Scope scope;
  Config argmax_config;
  std::string dataset_id;
  ModelKind model = ModelKind::KNN;
};

struct TunabilityResult {
  /// Best F1 minus default F1; negative when every tuned config is worse.
  double value = 0.0;
  double default_f1 = 0.0;
  double best_f1 = 0.0;
  Config best_config;
  Scope scope;
  std::string dataset_id;
  ModelKind model = ModelKind::KNN;
};

struct AggregateStat {
  double mean = 0.0;
  /// Sample standard deviation (divisor m - 1); absent for m = 1.
  std::optional<double> std;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Number of positions where a and b differ.
std::size_t disagreement_count(std::span<const Label> a, std::span<const Label> b);
/// Normalized Hamming distance. LengthMismatch, Empty.
double disagreement(std::span<const Label> a, std::span<const Label> b);

struct F1Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// 2TP + FP + FN == 0: no predicted and no true positives.
  bool degenerate() const noexcept { return 2 * tp + fp + fn == 0; }
  /// 2TP / (2TP + FP + FN), 0 for the degenerate case.
  double value() const noexcept;
};

F1Counts f1_counts(std::span<const Label> pred, std::span<const Label> truth, Label positive);
double f1(std::span<const Label> pred, std::span<const Label> truth, Label positive);

/// Max disagreement against the default over non-default, non-failed
/// entries; ties go to the lower config id. NoComparableEntry when none.
DiscrepancyResult model_discrepancy(const PredictionSet& ps);
/// As model_discrepancy; NotMarginal if an entry varies anything but h.
DiscrepancyResult marginal_discrepancy(const PredictionSet& ps, const std::string& h);
/// As model_discrepancy; NotPairwise if an entry varies anything outside {h1, h2}.
DiscrepancyResult joint_discrepancy(const PredictionSet& ps, const std::string& h1,
                                    const std::string& h2);

/// Max F1 gain over the default. Marginal/joint scopes check the entries the
/// same way the discrepancy operations do.
TunabilityResult tunability(const PredictionSet& ps, const Scope& scope = Scope::model());

/// Entries whose config differs from the default only inside `params`.
PredictionSet restrict_to(const PredictionSet& ps, const std::vector<std::string>& params);
/// Parameters that at least one non-default entry varies on its own.
std::vector<std::string> marginal_params(const PredictionSet& ps);

/// Summary over per-dataset values. Empty when values is empty.
AggregateStat aggregate(std::span<const double> values);

}  // namespace hypermult

#include "hypermult/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hypermult/error.hpp"

namespace hypermult {

std::string Scope::to_string() const {
  switch (kind) {
    case Kind::Model: return "model";
    case Kind::Marginal: return "marginal(" + h1 + ")";
    case Kind::Joint: return "joint(" + h1 + "," + h2 + ")";
  }
  return "model";
}

std::size_t disagreement_count(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "label vectors of length " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()));
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i];
  return count;
}

double disagreement(std::span<const Label> a, std::span<const Label> b) {
  const std::size_t count = disagreement_count(a, b);
  if (a.empty()) throw Error(ErrorCode::Empty, "disagreement of empty label vectors");
  return static_cast<double>(count) / static_cast<double>(a.size());
}

double F1Counts::value() const noexcept {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

F1Counts f1_counts(std::span<const Label> pred, std::span<const Label> truth, Label positive) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "prediction and truth differ in length");
  }
  F1Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive;
    const bool t = truth[i] == positive;
    c.tp += p && t;
    c.fp += p && !t;
    c.fn += !p && t;
  }
  return c;
}

double f1(std::span<const Label> pred, std::span<const Label> truth, Label positive) {
  return f1_counts(pred, truth, positive).value();
}

namespace {

// Checks that every non-default entry varies only parameters in `allowed`.
void check_scope(const PredictionSet& ps, const Scope& scope) {
  if (scope.kind == Scope::Kind::Model) return;
  const Config& def = ps.default_prediction().config;
  for (std::size_t i = 0; i < ps.entries.size(); ++i) {
    if (i == ps.default_entry) continue;
    for (const auto& name : ps.entries[i].config.differing(def)) {
      if (name == scope.h1 || (scope.kind == Scope::Kind::Joint && name == scope.h2)) continue;
      throw Error(scope.kind == Scope::Kind::Marginal ? ErrorCode::NotMarginal : ErrorCode::NotPairwise,
                  "config " + ps.entries[i].config.id() + " varies '" + name + "' outside " +
                      scope.to_string());
    }
  }
}

bool prefer(const Config& candidate, const Config& incumbent) {
  return candidate.id() < incumbent.id();
}

DiscrepancyResult discrepancy(const PredictionSet& ps, const Scope& scope) {
  check_scope(ps, scope);
  const auto& base = ps.default_prediction().labels;
  DiscrepancyResult result;
  result.scope = scope;
  result.dataset_id = ps.dataset_id;
  result.model = ps.model;
  result.n = base.size();
  bool found = false;
  for (std::size_t i = 0; i < ps.entries.size(); ++i) {
    const auto& e = ps.entries[i];
    if (i == ps.default_entry || e.failed) continue;
    const std::size_t count = disagreement_count(e.labels, base);
    if (!found || count > result.disagreements ||
        (count == result.disagreements && prefer(e.config, result.argmax_config))) {
      result.disagreements = count;
      result.argmax_config = e.config;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::NoComparableEntry,
                ps.dataset_id + "/" + std::string(model_name(ps.model)) + " " + scope.to_string() +
                    ": no non-default, non-failed entry to compare");
  }
  if (result.n == 0) throw Error(ErrorCode::Empty, "empty evaluation set");
  result.value = static_cast<double>(result.disagreements) / static_cast<double>(result.n);
  return result;
}

}  // namespace

DiscrepancyResult model_discrepancy(const PredictionSet& ps) { return discrepancy(ps, Scope::model()); }

DiscrepancyResult marginal_discrepancy(const PredictionSet& ps, const std::string& h) {
  return discrepancy(ps, Scope::marginal(h));
}

DiscrepancyResult joint_discrepancy(const PredictionSet& ps, const std::string& h1,
                                    const std::string& h2) {
  if (h1 == h2) throw Error(ErrorCode::SameParam, "joint discrepancy needs two distinct parameters");
  return discrepancy(ps, Scope::joint(h1, h2));
}

TunabilityResult tunability(const PredictionSet& ps, const Scope& scope) {
  check_scope(ps, scope);
  const auto& def = ps.default_prediction();
  const F1Counts base = f1_counts(def.labels, ps.eval_labels, ps.positive_label);

  TunabilityResult result;
  result.scope = scope;
  result.dataset_id = ps.dataset_id;
  result.model = ps.model;
  result.default_f1 = base.value();

  // F1 values compared as exact fractions num/den.
  std::size_t best_num = 0;
  std::size_t best_den = 1;
  bool found = false;
  for (std::size_t i = 0; i < ps.entries.size(); ++i) {
    const auto& e = ps.entries[i];
    if (i == ps.default_entry || e.failed) continue;
    const F1Counts c = f1_counts(e.labels, ps.eval_labels, ps.positive_label);
    const std::size_t num = c.degenerate() ? 0 : 2 * c.tp;
    const std::size_t den = c.degenerate() ? 1 : 2 * c.tp + c.fp + c.fn;
    const std::size_t lhs = num * best_den;
    const std::size_t rhs = best_num * den;
    if (!found || lhs > rhs || (lhs == rhs && prefer(e.config, result.best_config))) {
      best_num = num;
      best_den = den;
      result.best_config = e.config;
      result.best_f1 = c.value();
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::NoComparableEntry,
                ps.dataset_id + "/" + std::string(model_name(ps.model)) + " " + scope.to_string() +
                    ": no non-default, non-failed entry to compare");
  }
  result.value = result.best_f1 - result.default_f1;
  return result;
}

PredictionSet restrict_to(const PredictionSet& ps, const std::vector<std::string>& params) {
  const Config& def = ps.default_prediction().config;
  return ps.filtered([&](const PredictionEntry& e) {
    for (const auto& name : e.config.differing(def)) {
      if (std::find(params.begin(), params.end(), name) == params.end()) return false;
    }
    return true;
  });
}

std::vector<std::string> marginal_params(const PredictionSet& ps) {
  const Config& def = ps.default_prediction().config;
  std::set<std::string> names;
  for (std::size_t i = 0; i < ps.entries.size(); ++i) {
    if (i == ps.default_entry) continue;
    auto diff = ps.entries[i].config.differing(def);
    if (diff.size() == 1) names.insert(diff.front());
  }
  return {names.begin(), names.end()};
}

AggregateStat aggregate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::Empty, "aggregate over no values");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "aggregate over a non-finite value");
  }
  AggregateStat s;
  s.count = values.size();
  const auto m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / m;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (m - 1.0));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  // A constant sample is reported exactly, without summation rounding.
  if (s.min == s.max) {
    s.mean = s.min;
    if (s.std) s.std = 0.0;
  }
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

}  // namespace hypermult

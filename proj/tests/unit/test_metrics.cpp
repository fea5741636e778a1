#include <doctest.h>

#include "hypermult/error.hpp"
#include "hypermult/metrics.hpp"
#include "support/synthetic.hpp"

using namespace hypermult;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

// Entries vary "k"; labels given per entry, default first.
PredictionSet make_set(const Labels& truth, const Labels& def, const std::vector<std::pair<double, Labels>>& others) {
  PredictionSet ps;
  ps.dataset_id = "m";
  ps.eval_labels = truth;
  ps.entries.push_back({Config({{"k", 7}}, true), def, false, false, ""});
  for (const auto& [k, labels] : others) ps.entries.push_back({Config({{"k", k}}), labels, false, false, ""});
  ps.validate();
  return ps;
}

}  // namespace

TEST_CASE("disagreement examples") {
  Labels a{0, 1, 1, 0}, b{0, 0, 1, 1}, c{1, 0, 0, 1};
  CHECK(disagreement(a, a) == 0.0);
  CHECK(disagreement(a, c) == 1.0);
  CHECK(disagreement(a, b) == 0.5);
  CHECK(disagreement(b, a) == 0.5);
  CHECK(disagreement_count(a, b) == 2);
  CHECK(code_of([] { disagreement(Labels{0}, Labels{0, 1}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { disagreement(Labels{}, Labels{}); }) == ErrorCode::Empty);
}

TEST_CASE("f1 examples") {
  CHECK(f1(Labels{1, 0, 1}, Labels{1, 0, 1}, 1) == 1.0);
  // TP = 2, FP = 1, FN = 1.
  CHECK(f1(Labels{1, 1, 1, 0, 0}, Labels{1, 1, 0, 1, 0}, 1) == 2.0 * 2 / (2 * 2 + 1 + 1));
  auto degenerate = f1_counts(Labels{0, 0}, Labels{0, 0}, 1);
  CHECK(degenerate.degenerate());
  CHECK(degenerate.value() == 0.0);
  // The positive label can be 0.
  CHECK(f1(Labels{0, 1}, Labels{0, 0}, 0) == 2.0 / 3.0);
}

TEST_CASE("model discrepancy picks the largest disagreement") {
  // Ten eval rows; disagreements 1, 4 and 2 give 0.1, 0.4, 0.2.
  Labels truth(10, 0), def(10, 0);
  Labels e1 = def, e2 = def, e3 = def;
  e1[0] = 1;
  for (int i = 0; i < 4; ++i) e2[i] = 1;
  e3[5] = e3[6] = 1;
  auto ps = make_set(truth, def, {{1, e1}, {2, e2}, {3, e3}});
  auto r = model_discrepancy(ps);
  CHECK(r.value == 0.4);
  CHECK(r.disagreements == 4);
  CHECK(r.argmax_config.at("k") == 2);
  CHECK(r.scope == Scope::model());

  auto only_default = make_set(truth, def, {});
  CHECK(code_of([&] { model_discrepancy(only_default); }) == ErrorCode::NoComparableEntry);
}

TEST_CASE("argmax ties resolve to the lowest config id") {
  Labels truth(4, 0), def(4, 0), flip{1, 0, 0, 0}, other{0, 0, 0, 1};
  auto ps = make_set(truth, def, {{1, flip}, {2, other}, {3, flip}});
  std::string lowest = ps.entries[1].config.id();
  for (const auto& e : ps.entries) {
    if (!e.config.is_default()) lowest = std::min(lowest, e.config.id());
  }
  CHECK(model_discrepancy(ps).argmax_config.id() == lowest);
  CHECK(tunability(ps).best_config.id() == lowest);
}

TEST_CASE("tunability examples") {
  Labels truth{1, 1, 0, 0};
  auto same = make_set(truth, Labels{1, 0, 0, 0}, {{1, Labels{1, 0, 0, 0}}});
  CHECK(tunability(same).value == 0.0);

  // Default F1 = 2/3; entries give 1/2 and 4/5, so the gain is 4/5 - 2/3.
  auto ps = make_set(truth, Labels{1, 0, 0, 0}, {{1, Labels{0, 0, 0, 1}}, {2, Labels{1, 1, 1, 0}}});
  auto t = tunability(ps);
  CHECK(t.default_f1 == 2.0 / 3.0);
  CHECK(t.best_f1 == 0.8);
  CHECK(t.value == 0.8 - 2.0 / 3.0);
  CHECK(t.best_config.at("k") == 2);

  // Every tuned config worse: negative tunability is kept.
  auto worse = make_set(truth, Labels{1, 1, 0, 0}, {{1, Labels{0, 0, 1, 1}}});
  CHECK(tunability(worse).value == -1.0);
}

TEST_CASE("failed entries are ignored") {
  Labels truth{1, 0}, def{1, 0};
  auto ps = make_set(truth, def, {{1, Labels{0, 1}}});
  ps.entries[1].failed = true;
  ps.entries[1].labels.clear();
  CHECK(code_of([&] { model_discrepancy(ps); }) == ErrorCode::NoComparableEntry);
  CHECK(code_of([&] { tunability(ps); }) == ErrorCode::NoComparableEntry);
}

TEST_CASE("scoped metrics check the config shape") {
  PredictionSet ps;
  ps.eval_labels = {0, 1, 1};
  ps.entries.push_back({Config({{"a", 0}, {"b", 0}, {"c", 0}}, true), {0, 1, 1}, false, false, ""});
  ps.entries.push_back({Config({{"a", 1}, {"b", 0}, {"c", 0}}), {1, 1, 1}, false, false, ""});
  ps.entries.push_back({Config({{"a", 1}, {"b", 2}, {"c", 0}}), {1, 0, 0}, false, false, ""});
  ps.validate();
  CHECK(code_of([&] { marginal_discrepancy(ps, "a"); }) == ErrorCode::NotMarginal);
  CHECK(code_of([&] { tunability(ps, Scope::marginal("a")); }) == ErrorCode::NotMarginal);
  CHECK(joint_discrepancy(ps, "a", "b").value == 1.0);
  CHECK(code_of([&] { joint_discrepancy(ps, "a", "c"); }) == ErrorCode::NotPairwise);
  CHECK(code_of([&] { joint_discrepancy(ps, "a", "a"); }) == ErrorCode::SameParam);

  auto only_a = restrict_to(ps, {"a"});
  CHECK(only_a.entries.size() == 2);
  CHECK(marginal_discrepancy(only_a, "a").value == doctest::Approx(1.0 / 3.0));
  CHECK(marginal_params(ps) == std::vector<std::string>{"a"});
  CHECK(marginal_discrepancy(only_a, "a").value <= joint_discrepancy(ps, "a", "b").value);
}

TEST_CASE("metrics agree with a brute-force oracle") {
  CounterRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto ps = testing::random_prediction_set(rng, 1 + rng.below(30), 2 + rng.below(20));
    auto check_scope = [&](const std::vector<std::string>& allowed, auto&& metric, auto&& tune) {
      auto expected = testing::oracle::discrepancy(ps, allowed);
      auto expected_f1 = testing::oracle::best_f1(ps, allowed);
      auto subset = allowed.empty() ? ps : restrict_to(ps, allowed);
      if (!expected) {
        CHECK(code_of([&] { metric(subset); }) == ErrorCode::NoComparableEntry);
        return;
      }
      auto r = metric(subset);
      CHECK(r.disagreements == expected->count);
      CHECK(r.value == static_cast<double>(expected->count) / ps.eval_labels.size());
      CHECK(r.argmax_config.id() == expected->id);
      auto t = tune(subset);
      const auto& def = ps.entries[ps.default_entry];
      CHECK(t.best_config.id() == expected_f1->id);
      CHECK(t.value == static_cast<double>(expected_f1->count) / expected_f1->den -
                           testing::oracle::f1(def.labels, ps.eval_labels, ps.positive_label));
    };
    check_scope({}, [](const PredictionSet& s) { return model_discrepancy(s); },
                [](const PredictionSet& s) { return tunability(s); });
    check_scope({"a"}, [](const PredictionSet& s) { return marginal_discrepancy(s, "a"); },
                [](const PredictionSet& s) { return tunability(s, Scope::marginal("a")); });
    check_scope({"a", "b"}, [](const PredictionSet& s) { return joint_discrepancy(s, "a", "b"); },
                [](const PredictionSet& s) { return tunability(s, Scope::joint("a", "b")); });
  }
}

TEST_CASE("aggregate examples") {
  auto single = aggregate(std::vector<double>{0.25});
  CHECK(single.mean == 0.25);
  CHECK(single.median == 0.25);
  CHECK_FALSE(single.std.has_value());
  CHECK(single.count == 1);

  auto three = aggregate(std::vector<double>{0.3, 0.1, 0.2});
  CHECK(three.mean == doctest::Approx(0.2));
  CHECK(three.median == 0.2);
  CHECK(*three.std == doctest::Approx(0.1));
  CHECK(three.min == 0.1);
  CHECK(three.max == 0.3);

  auto flat = aggregate(std::vector<double>{0.7, 0.7, 0.7, 0.7});
  CHECK(*flat.std == 0.0);
  CHECK(flat.min == 0.7);
  CHECK(flat.max == 0.7);
  CHECK(aggregate(std::vector<double>{1, 2, 3, 10}).median == 2.5);

  CHECK(code_of([] { aggregate(std::vector<double>{}); }) == ErrorCode::Empty);
  CHECK(code_of([] { aggregate(std::vector<double>{NAN}); }) == ErrorCode::NonFinite);
}

TEST_CASE("scope names") {
  CHECK(Scope::model().to_string() == "model");
  CHECK(Scope::marginal("k").to_string() == "marginal(k)");
  CHECK(Scope::joint("cp", "maxdepth").to_string() == "joint(cp,maxdepth)");
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypermult/error.hpp"
#include "hypermult/reports.hpp"
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

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hypermult_test_reports_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

DatasetResult result(ModelKind model, std::string dataset, double disc, double tune) {
  DatasetResult r;
  r.discrepancy.model = r.tunability.model = model;
  r.discrepancy.dataset_id = r.tunability.dataset_id = std::move(dataset);
  r.discrepancy.value = disc;
  r.tunability.value = tune;
  r.n_configs = 3;
  return r;
}

ParamSpec linear(std::string name, double lo, double hi) {
  return ParamSpec{std::move(name), ParamKind::Real, lo, hi, Scale::Linear, lo, {}};
}

}  // namespace

TEST_CASE("mean and std render with four decimals") {
  AggregateStat s;
  s.mean = 0.2020;
  s.std = 0.2170;
  CHECK(format_mean_std(s) == "0.2020 ± 0.2170");
  s.std.reset();
  CHECK(format_mean_std(s) == "0.2020");
  CHECK(format_fixed4(-0.00001) == "0.0000");
  CHECK(format_fixed4(0.12345) == "0.1235");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("equal-range bins") {
  std::vector<double> v{0.1, 0.5, 0.9};
  const double lo = 0.1, w = (0.9 - 0.1) / 3.0;
  auto breaks = equal_range_breaks(v, 3);
  REQUIRE(breaks.size() == 2);
  CHECK(breaks[0] == doctest::Approx(lo + w));
  CHECK(breaks[1] == doctest::Approx(lo + 2 * w));
  CHECK(format_fixed4(breaks[0]) == "0.3667");
  CHECK(format_fixed4(breaks[1]) == "0.6333");
  CHECK(equal_range_bins(v, 3) == std::vector<int>{0, 1, 2});

  std::vector<double> on_break{0.0, 1.0 / 3.0, 1.0};
  on_break[1] = equal_range_breaks(on_break, 3)[0];
  CHECK(equal_range_bins(on_break, 3) == std::vector<int>{0, 1, 2});

  CHECK(equal_range_bins(std::vector<double>{0.4, 0.4, 0.4}, 3) == std::vector<int>{0, 0, 0});
  CHECK(equal_range_breaks(std::vector<double>{0.4, 0.4}, 3).empty());
  CHECK(code_of([] { equal_range_bins(std::vector<double>{0.1, INFINITY}, 3); }) == ErrorCode::NonFinite);
  CHECK(code_of([] { equal_range_bins(std::vector<double>{}, 3); }) == ErrorCode::Empty);
}

TEST_CASE("bivariate classification skips empty regions") {
  std::vector<RegionCell> cells(4);
  cells[0].mean_f1 = 0.6, cells[0].mean_discrepancy = 0.1, cells[0].members = 1;
  cells[1].mean_f1 = 0.6, cells[1].mean_discrepancy = 0.5, cells[1].members = 2;
  cells[3].mean_f1 = 0.6, cells[3].mean_discrepancy = 0.9, cells[3].members = 1;
  auto grid = bivariate_grid(cells);
  REQUIRE(grid.size() == 3);
  for (const auto& c : grid) CHECK(c.f1_bin == 0);
  CHECK(grid[0].disc_bin == 0);
  CHECK(grid[1].disc_bin == 1);
  CHECK(grid[2].disc_bin == 2);
  CHECK(code_of([] { bivariate_grid(std::vector<RegionCell>(2)); }) == ErrorCode::Empty);
}

TEST_CASE("relabeling cells leaves the bin multiset unchanged") {
  CounterRng rng(4);
  std::vector<RegionCell> cells(12);
  for (auto& c : cells) c.mean_f1 = rng.uniform(), c.mean_discrepancy = rng.uniform(), c.members = 1;
  auto a = bivariate_grid(cells);
  std::vector<RegionCell> shuffled = cells;
  rng.shuffle(shuffled);
  auto b = bivariate_grid(shuffled);
  std::multiset<std::pair<int, int>> ma, mb;
  for (const auto& c : a) ma.insert({c.f1_bin, c.disc_bin});
  for (const auto& c : b) mb.insert({c.f1_bin, c.disc_bin});
  CHECK(ma == mb);
}

TEST_CASE("axis regions partition the parameter's own scale") {
  auto cp = linear("cp", 0, 1);
  CHECK(axis_region(cp, 0.0, 10) == 0);
  CHECK(axis_region(cp, 0.1, 10) == 1);
  CHECK(axis_region(cp, 1.0, 10) == 9);
  CHECK(axis_region(cp, 2.0, 10) == 9);
  CHECK(axis_region(cp, -1.0, 10) == 0);

  ParamSpec lambda{"lambda", ParamKind::Real, std::exp2(-10), std::exp2(10), Scale::Log2, 0, {}};
  CHECK(axis_region(lambda, std::exp2(-10), 4) == 0);
  CHECK(axis_region(lambda, std::exp2(-4), 4) == 1);
  CHECK(axis_region(lambda, 1.0, 4) == 2);
  CHECK(axis_region(lambda, std::exp2(9), 4) == 3);
  CHECK(axis_region(lambda, 0.0, 4) == 0);
  auto iv = axis_interval(lambda, 1, 4);
  CHECK(iv.lo == std::exp2(-5));
  CHECK(iv.hi == 1.0);
}

TEST_CASE("region means") {
  // Default alone in its region; two configs with disagreements 0.2 and 0.4
  // share another region.
  PredictionSet ps;
  ps.eval_labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  Labels base = ps.eval_labels;
  Labels two = base, four = base;
  two[0] = two[1] = 1;
  for (int i = 0; i < 4; ++i) four[i] = 1;
  ps.entries.push_back({Config({{"a", 0.05}, {"b", 0.05}}, true), base, false, false, ""});
  ps.entries.push_back({Config({{"a", 0.9}, {"b", 0.9}}), two, false, false, ""});
  ps.entries.push_back({Config({{"a", 0.95}, {"b", 0.95}}), four, false, false, ""});
  ps.validate();
  auto cells = region_cells(std::vector<PredictionSet>{ps}, linear("a", 0, 1), linear("b", 0, 1), 2);
  REQUIRE(cells.size() == 4);
  CHECK(*cells[0].mean_discrepancy == 0.0);
  CHECK(*cells[0].mean_f1 == 1.0);
  CHECK_FALSE(cells[1].mean_f1.has_value());
  CHECK_FALSE(cells[2].mean_f1.has_value());
  CHECK(*cells[3].mean_discrepancy == doctest::Approx(0.3));
  CHECK(cells[3].members == 2);
  CHECK(cells[1].h2_range == Interval{0.5, 1.0});

  PredictionSet bad = ps;
  bad.entries.push_back({Config({{"a", 0.05}, {"b", 0.05}, {"c", 1}}), base, false, false, ""});
  CHECK_THROWS_AS(region_cells(std::vector<PredictionSet>{bad}, linear("a", 0, 1), linear("b", 0, 1), 2), Error);
}

TEST_CASE("panel means match brute-force recomputation") {
  CounterRng rng(17);
  std::vector<PredictionSet> sets;
  for (int s = 0; s < 3; ++s) {
    PredictionSet ps;
    ps.dataset_id = "d" + std::to_string(s);
    ps.eval_labels = testing::random_labels(rng, 25);
    Labels base = testing::random_labels(rng, 25);
    ps.entries.push_back({Config({{"a", 0.1}, {"b", 7}}, true), base, false, false, ""});
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (double b : {1.0, 8.0, 16.0, 23.0, 30.0}) {
        ps.entries.push_back({Config({{"a", a}, {"b", b}}), testing::perturb(rng, base, rng.below(10)), false, false, ""});
      }
    }
    ps.validate();
    sets.push_back(ps);
  }
  auto ha = linear("a", 0, 1), hb = linear("b", 1, 30);
  auto cells = region_cells(sets, ha, hb, 5);
  REQUIRE(cells.size() == 25);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double f = 0, d = 0;
      std::size_t m = 0;
      for (const auto& ps : sets) {
        const auto& base = ps.entries[0].labels;
        for (const auto& e : ps.entries) {
          const double a = e.config.at("a"), b = e.config.at("b");
          const auto ia = std::min<std::size_t>(4, static_cast<std::size_t>(a / 0.2));
          const auto ib = std::min<std::size_t>(4, static_cast<std::size_t>((b - 1) / (29.0 / 5)));
          if (ia != i || ib != j) continue;
          std::size_t diff = 0;
          for (std::size_t r = 0; r < base.size(); ++r) diff += e.labels[r] != base[r];
          d += static_cast<double>(diff) / base.size();
          f += testing::oracle::f1(e.labels, ps.eval_labels, ps.positive_label);
          ++m;
        }
      }
      const auto& c = cells[i * 5 + j];
      CHECK(c.members == m);
      REQUIRE(m > 0);
      CHECK(std::abs(*c.mean_f1 - f / m) <= 1e-12);
      CHECK(std::abs(*c.mean_discrepancy - d / m) <= 1e-12);
    }
  }
}

TEST_CASE("summary rows aggregate their own dataset lists") {
  std::vector<DatasetResult> results{result(ModelKind::KNN, "a", 0.1, 0.0), result(ModelKind::KNN, "b", 0.3, 0.1),
                                     result(ModelKind::ElasticNet, "c", 0.2, 0.05)};
  DatasetResult marginal = result(ModelKind::KNN, "z", 0.9, 0.9);
  marginal.discrepancy.scope = Scope::marginal("k");
  results.push_back(marginal);
  auto rows = summary_table(results);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].model == ModelKind::ElasticNet);
  CHECK(rows[0].discrepancy.count == 1);
  CHECK_FALSE(rows[0].discrepancy.std.has_value());
  CHECK(rows[1].model == ModelKind::KNN);
  CHECK(rows[1].datasets == std::vector<std::string>{"a", "b"});
  CHECK(rows[1].discrepancy.mean == doctest::Approx(0.2));
  CHECK(summary_table(std::vector<DatasetResult>{}).empty());
}

TEST_CASE("json report omits empty sections and keeps key order") {
  Report report;
  report.meta.tool_version = "t";
  report.meta.command = "sweep";
  std::vector<DatasetResult> results{result(ModelKind::KNN, "a", 0.1, 0.0), result(ModelKind::KNN, "b", 0.3, 0.1)};
  report.per_dataset = results;
  report.summary = summary_table(results);
  auto j = to_json(report);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"meta", "summary", "per_dataset"});
  CHECK(j["meta"]["schema_version"] == kReportSchemaVersion);
  CHECK_FALSE(j["meta"].contains("timestamp"));
  CHECK(j["summary"][0]["discrepancy"]["text"] == "0.2000 ± 0.1414");
  CHECK(j.dump().find("null") == std::string::npos);
}

TEST_CASE("emit writes files and refuses to overwrite") {
  auto dir = fresh_dir("emit");
  Report report;
  report.meta.tool_version = "t";
  std::vector<DatasetResult> results{result(ModelKind::KNN, "a", 0.1, 0.0)};
  report.per_dataset = results;
  report.summary = summary_table(results);

  auto json_files = emit(report, ReportFormat::Json, dir / "report.json");
  REQUIRE(json_files.size() == 1);
  std::ifstream in(json_files[0]);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(nlohmann::ordered_json::parse(text.str()) == to_json(report));
  CHECK(code_of([&] { emit(report, ReportFormat::Json, dir / "report.json"); }) == ErrorCode::IoError);
  emit(report, ReportFormat::Json, dir / "report.json", true);

  auto csv_files = emit(report, ReportFormat::Csv, dir / "csv");
  CHECK(csv_files.size() == 2);
  CHECK(std::filesystem::exists(dir / "csv" / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "csv" / "per_dataset.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "csv" / "marginal.csv"));
  CHECK(code_of([&] { emit(report, ReportFormat::Csv, dir / "csv"); }) == ErrorCode::IoError);
}

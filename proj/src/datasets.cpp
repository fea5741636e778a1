#include "hypermult/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hypermult/error.hpp"
#include "hypermult/rng.hpp"

namespace hypermult {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "matrix data size does not match shape");
  }
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[i] * cols_), cols_,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  return out;
}

std::array<std::size_t, 2> Dataset::class_counts() const noexcept {
  std::array<std::size_t, 2> counts{0, 0};
  for (Label y : labels) counts[y != 0] += 1;
  return counts;
}

Label Dataset::majority_label() const noexcept {
  auto counts = class_counts();
  return counts[1] > counts[0] ? 1 : 0;
}

void Dataset::validate(std::size_t min_rows) const {
  if (features.rows() != labels.size()) {
    throw Error(ErrorCode::InvalidDataset, id + ": feature rows and labels differ in length");
  }
  if (features.cols() < 1) throw Error(ErrorCode::InvalidDataset, id + ": no feature columns");
  if (labels.size() < min_rows) {
    throw Error(ErrorCode::InvalidDataset,
                id + ": needs at least " + std::to_string(min_rows) + " rows, has " +
                    std::to_string(labels.size()));
  }
  for (Label y : labels) {
    if (y > 1) throw Error(ErrorCode::InvalidDataset, id + ": label outside {0,1}");
  }
  auto counts = class_counts();
  if (counts[0] == 0 || counts[1] == 0) {
    throw Error(ErrorCode::InvalidDataset, id + ": both classes must be present");
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::MissingValue, id + ": non-finite feature value");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.id = id;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  out.feature_names = feature_names;
  out.positive_label = positive_label;
  out.label_names = label_names;
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

// Locale-independent: from_chars only accepts '.' as decimal separator.
std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string id) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, id + ": no header row");
  if (lines.size() == 1) throw Error(ErrorCode::EmptyFile, id + ": no data rows");

  std::vector<std::string> header = split_fields(lines[0]);
  if (header.size() < 2) {
    throw Error(ErrorCode::InvalidDataset, id + ": need at least one feature and a target column");
  }

  std::size_t target = header.size() - 1;
  if (!options.target.empty()) {
    auto it = std::find(header.begin(), header.end(), options.target);
    if (it != header.end()) {
      target = static_cast<std::size_t>(it - header.begin());
    } else {
      std::size_t index = 0;
      auto [ptr, ec] = std::from_chars(options.target.data(),
                                       options.target.data() + options.target.size(), index);
      if (ec != std::errc() || ptr != options.target.data() + options.target.size() ||
          index >= header.size()) {
        throw Error(ErrorCode::InvalidDataset, id + ": target column '" + options.target +
                                                   "' not found");
      }
      target = index;
    }
  }

  const std::size_t n = lines.size() - 1;
  const std::size_t p = header.size() - 1;
  std::vector<double> values(n * p, 0.0);
  std::vector<bool> missing(n * p, false);
  std::vector<std::string> raw_targets(n);

  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::string> fields = split_fields(lines[r + 1]);
    const std::size_t line_no = r + 2;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::InvalidDataset, id + ": line " + std::to_string(line_no) + " has " +
                                                 std::to_string(fields.size()) + " fields, expected " +
                                                 std::to_string(header.size()));
    }
    std::size_t c = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (f == target) {
        if (fields[f].empty()) {
          throw Error(ErrorCode::MissingValue,
                      id + ": line " + std::to_string(line_no) + " has an empty target");
        }
        raw_targets[r] = fields[f];
        continue;
      }
      if (auto v = parse_number(fields[f])) {
        values[r * p + c] = *v;
      } else if (options.impute == Impute::Mean) {
        missing[r * p + c] = true;
      } else {
        throw Error(ErrorCode::MissingValue, id + ": line " + std::to_string(line_no) + ", column '" +
                                                 header[f] + "' is empty or non-numeric");
      }
      ++c;
    }
  }

  // Column means over the present cells of the full file.
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!missing[r * p + c]) {
        sum += values[r * p + c];
        ++present;
      }
    }
    if (present == n) continue;
    if (present == 0) {
      throw Error(ErrorCode::MissingValue, id + ": column has no numeric values to impute from");
    }
    const double mean = sum / static_cast<double>(present);
    for (std::size_t r = 0; r < n; ++r) {
      if (missing[r * p + c]) values[r * p + c] = mean;
    }
  }

  std::vector<std::string> distinct = raw_targets;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    throw Error(ErrorCode::NotBinaryTarget, id + ": target column has " +
                                                std::to_string(distinct.size()) +
                                                " distinct values, expected 2");
  }
  // Numeric targets map in numeric order so "0"/"1" keep their codes.
  auto a = parse_number(distinct[0]);
  auto b = parse_number(distinct[1]);
  if (a && b && *b < *a) std::swap(distinct[0], distinct[1]);

  Dataset d;
  d.id = std::move(id);
  d.features = Matrix(n, p, std::move(values));
  d.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) d.labels[r] = raw_targets[r] == distinct[1] ? 1 : 0;
  for (std::size_t f = 0; f < header.size(); ++f) {
    if (f != target) d.feature_names.push_back(header[f]);
  }
  d.label_names = {distinct[0], distinct[1]};

  if (options.positive) {
    std::string positive(trim(*options.positive));
    if (positive == distinct[0]) {
      d.positive_label = 0;
    } else if (positive == distinct[1]) {
      d.positive_label = 1;
    } else {
      throw Error(ErrorCode::NotBinaryTarget,
                  d.id + ": positive label '" + positive + "' is not a target value");
    }
  } else {
    auto counts = d.class_counts();
    d.positive_label = counts[0] < counts[1] ? 0 : 1;
  }
  d.validate(2);
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.erase(0, 3);
  }
  return parse_csv(text, options, options.id ? *options.id : path.stem().string());
}

SplitPair split(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::DegenerateSplit, "split fraction must lie in (0,1)");
  }
  d.validate(10);

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t r = 0; r < d.n(); ++r) by_class[d.labels[r]].push_back(r);

  std::vector<std::size_t> eval_rows;
  std::vector<std::size_t> train_rows;
  for (Label cls : {Label{0}, Label{1}}) {
    auto& rows = by_class[cls];
    if (rows.size() < 2) {
      throw Error(ErrorCode::DegenerateSplit,
                  d.id + ": class " + d.label_names[cls] + " has " + std::to_string(rows.size()) +
                      " row(s); both parts need one");
    }
    CounterRng rng(derive_seed(seed, {"split", cls == 0 ? "class0" : "class1"}));
    rng.shuffle(rows);
    auto take = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(rows.size())));
    take = std::clamp<std::size_t>(take, 1, rows.size() - 1);
    eval_rows.insert(eval_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(take), rows.end());
  }
  std::sort(eval_rows.begin(), eval_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  SplitPair out;
  out.train = d.subset(train_rows);
  out.eval = d.subset(eval_rows);
  out.seed = seed;
  out.fraction = fraction;
  out.train_rows = std::move(train_rows);
  out.eval_rows = std::move(eval_rows);
  return out;
}

Standardizer::Standardizer(const Matrix& x) : mean_(x.cols(), 0.0), scale_(x.cols(), 1.0) {
  const auto n = static_cast<double>(x.rows());
  if (x.rows() == 0) return;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - mean) * (x(r, c) - mean);
    const double sd = std::sqrt(ss / n);
    mean_[c] = mean;
    scale_[c] = sd > 0.0 ? sd : 1.0;
  }
}

void Standardizer::transform_row(std::span<const double> in, std::span<double> out) const {
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean_[c]) / scale_[c];
}

Matrix Standardizer::transform(const Matrix& x) const {
  if (x.cols() != mean_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardizer fitted on " + std::to_string(mean_.size()) +
                                                  " columns, got " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) transform_row(x.row(r), out.row(r));
  return out;
}

}  // namespace hypermult

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypermult {

using Label = std::uint8_t;
using Labels = std::vector<Label>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  /// Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Binary classification data: n rows by p numeric features.
struct Dataset {
  std::string id;
  Matrix features;
  Labels labels;
  std::vector<std::string> feature_names;
  /// Which label code counts as positive for F1.
  Label positive_label = 1;
  /// Original target values behind label codes 0 and 1.
  std::array<std::string, 2> label_names{"0", "1"};

  std::size_t n() const noexcept { return labels.size(); }
  std::size_t p() const noexcept { return features.cols(); }

  std::array<std::size_t, 2> class_counts() const noexcept;
  /// Label with the larger count; ties resolve to 0.
  Label majority_label() const noexcept;

  /// Checks shape, label domain and presence of both classes. Throws
  /// InvalidDataset. `min_rows` is 10 for anything fed to split().
  void validate(std::size_t min_rows = 2) const;

  Dataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;
};

struct SplitPair {
  Dataset train;
  Dataset eval;
  std::uint64_t seed = 0;
  double fraction = 0.3;
  /// Source row indices of each part, ascending.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> eval_rows;

  bool operator==(const SplitPair&) const = default;
};

enum class Impute { Reject, Mean };

struct CsvOptions {
  /// Column name, or a zero-based index when no column carries that name.
  /// Empty selects the last column.
  std::string target;
  std::optional<std::string> positive;
  Impute impute = Impute::Reject;
  /// Overrides the file stem as dataset id.
  std::optional<std::string> id;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string id);

/// Stratified split. `fraction` of each class goes to eval, rounded to the
/// nearest row and clamped so every class keeps at least one row in each
/// part; DegenerateSplit when a class has fewer than two rows.
SplitPair split(const Dataset& d, double fraction, std::uint64_t seed);

/// Per-column z-scoring fitted on one dataset and replayed on others.
/// Constant columns are centered only.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Matrix& x);

  Matrix transform(const Matrix& x) const;
  void transform_row(std::span<const double> in, std::span<double> out) const;

  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace hypermult

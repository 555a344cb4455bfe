#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ennreg {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values);

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct Dataset {
  Matrix features;
  std::vector<double> response;
  std::vector<std::string> feature_names;
  std::string response_name = "y";

  std::size_t size() const { return response.size(); }
  std::size_t dim() const { return features.cols(); }

  /// Rows selected by index, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Per-feature affine scaling fitted on a training set.
struct FeatureScaling {
  std::vector<double> mean;
  std::vector<double> stddev;

  static FeatureScaling identity(std::size_t dim);
  std::size_t dim() const { return mean.size(); }

  void apply(std::span<const double> raw, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> raw) const;
};

/// Comma-separated, header row required, '.' decimal point. Every cell must be
/// a finite number. All columns other than the response become features.
Dataset load_csv(const std::filesystem::path& path, const std::string& response_column);

/// Loads every column as a feature; the response stays empty. For prediction
/// inputs that may or may not carry a response column.
Dataset load_features_csv(const std::filesystem::path& path);

/// Writes features followed by the response column, with a header row.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Mean and sample standard deviation (n - 1 denominator) of every feature. Throws
/// InputError on a constant feature.
FeatureScaling fit_scaling(const Dataset& train);

Dataset apply_scaling(const FeatureScaling& scaling, const Dataset& data);

/// fit_scaling followed by apply_scaling. The response is left untouched.
std::pair<Dataset, FeatureScaling> standardize(const Dataset& train);

/// Seeded shuffle, the first floor(n * fraction) rows go to the train part.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);

/// Index form of split.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed);

/// One-dimensional benchmark problem: x ~ 0.5 U(-3,-1) + 0.5 U(1,4),
/// y = x + sin(3x) + noise with variance 0.01 for x < 0 and 0.3 otherwise.
Dataset synthetic(std::size_t n, std::uint64_t seed);

double mean(std::span<const double> v);
/// Population variance (n denominator); 0 for a single value.
double variance(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> v);

}  // namespace ennreg

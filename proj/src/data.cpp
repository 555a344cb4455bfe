#include "ennreg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "ennreg/errors.hpp"

namespace ennreg {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw InputError("row length does not match matrix width");
  values_.insert(values_.end(), values.begin(), values.end());
  ++rows_;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = Matrix(0, dim());
  out.feature_names = feature_names;
  out.response_name = response_name;
  out.response.reserve(rows.size());
  for (const auto r : rows) {
    out.features.append_row(features.row(r));
    out.response.push_back(response[r]);
  }
  return out;
}

FeatureScaling FeatureScaling::identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

void FeatureScaling::apply(std::span<const double> raw, std::span<double> out) const {
  if (raw.size() != dim() || out.size() != dim()) {
    std::ostringstream msg;
    msg << "expected " << dim() << " features, got " << raw.size();
    throw InputError(msg.str());
  }
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = (raw[k] - mean[k]) / stddev[k];
}

std::vector<double> FeatureScaling::apply(std::span<const double> raw) const {
  std::vector<double> out(raw.size());
  apply(raw, out);
  return out;
}

namespace {

Dataset read_csv(const std::filesystem::path& path, const std::string* response_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file, header row required");
  std::vector<std::string> header = split_fields(line);
  for (auto& h : header) h = unquote(h);

  std::size_t response_index = header.size();
  Dataset data;
  if (response_column) {
    const auto it = std::find(header.begin(), header.end(), *response_column);
    if (it == header.end())
      throw InputError(path.string() + ": response column '" + *response_column + "' not found");
    response_index = static_cast<std::size_t>(it - header.begin());
    data.response_name = *response_column;
  }
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != response_index) data.feature_names.push_back(header[c]);
  data.features = Matrix(0, data.feature_names.size());

  std::vector<double> row(data.feature_names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << " has " << fields.size() << " fields, expected "
          << header.size();
      throw InputError(msg.str());
    }
    std::size_t out = 0;
    double response = 0.0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& cell = fields[c];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << path.string() << ": non-numeric value '" << cell << "' at line " << line_no
            << ", column " << (c + 1) << " (" << header[c] << ")";
        throw InputError(msg.str());
      }
      if (c == response_index)
        response = value;
      else
        row[out++] = value;
    }
    data.features.append_row(row);
    if (response_column) data.response.push_back(response);
  }
  return data;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& response_column) {
  return read_csv(path, &response_column);
}

Dataset load_features_csv(const std::filesystem::path& path) { return read_csv(path, nullptr); }

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t k = 0; k < data.dim(); ++k) {
    out << (k < data.feature_names.size() ? data.feature_names[k] : "x" + std::to_string(k + 1))
        << ',';
  }
  out << data.response_name << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (const double v : data.features.row(i)) out << v << ',';
    out << data.response[i] << '\n';
  }
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double n = static_cast<double>(v.size());
  return std::sqrt(variance(v) * n / (n - 1.0));
}

FeatureScaling fit_scaling(const Dataset& train) {
  if (train.size() < 2) throw InputError("standardization needs at least two rows");
  FeatureScaling s;
  const std::size_t p = train.dim();
  s.mean.assign(p, 0.0);
  s.stddev.assign(p, 0.0);
  std::vector<double> column(train.size());
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i < train.size(); ++i) column[i] = train.features(i, k);
    s.mean[k] = mean(column);
    s.stddev[k] = sample_stddev(column);
    if (!(s.stddev[k] > 0.0)) {
      const std::string name = k < train.feature_names.size() ? train.feature_names[k] : std::to_string(k + 1);
      throw InputError("feature '" + name + "' is constant and cannot be standardized");
    }
  }
  return s;
}

Dataset apply_scaling(const FeatureScaling& scaling, const Dataset& data) {
  Dataset out = data;
  for (std::size_t i = 0; i < data.size(); ++i) scaling.apply(data.features.row(i), out.features.row(i));
  return out;
}

std::pair<Dataset, FeatureScaling> standardize(const Dataset& train) {
  FeatureScaling s = fit_scaling(train);
  return {apply_scaling(s, train), std::move(s)};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("split fraction must lie in (0, 1)");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (data.size() < 3) throw InputError("split needs at least three rows");
  const auto [train, test] = split_indices(data.size(), fraction, seed);
  return {data.subset(train), data.subset(test)};
}

Dataset synthetic(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("sample size must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution left_component(0.5);
  std::uniform_real_distribution<double> left(-3.0, -1.0);
  std::uniform_real_distribution<double> right(1.0, 4.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset data;
  data.feature_names = {"x"};
  data.response_name = "y";
  data.features = Matrix(0, 1);
  data.response.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = left_component(rng) ? left(rng) : right(rng);
    const double sd = x < 0.0 ? std::sqrt(0.01) : std::sqrt(0.3);
    const double y = x + std::sin(3.0 * x) + sd * noise(rng);
    const double row[1] = {x};
    data.features.append_row(row);
    data.response.push_back(y);
  }
  return data;
}

}  // namespace ennreg

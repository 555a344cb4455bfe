#include "ennreg/prediction.hpp"

#include <algorithm>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/kernels.hpp"

namespace ennreg {

std::vector<double> normalize_levels(std::span<const double> levels) {
  std::vector<double> out(levels.begin(), levels.end());
  for (const double l : out)
    if (!(l > 0.0 && l < 1.0)) throw InputError("prediction levels must lie in (0, 1)");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PredictionSummary summarize(const Grfn& g, std::span<const double> levels) {
  PredictionSummary s;
  s.mean = g.mean;
  s.variance = g.variance;
  s.precision = g.precision;
  s.lower_expectation = lower_expectation(g);
  s.upper_expectation = upper_expectation(g);
  for (const double level : normalize_levels(levels)) s.intervals.emplace_back(level, prediction_interval(g, level));
  return s;
}

Matrix select_features(const Model& model, const Dataset& data) {
  const std::size_t p = model.input_dim();
  if (data.feature_names.empty() || model.feature_names.empty()) {
    if (data.dim() != p) {
      std::ostringstream msg;
      msg << "dimension mismatch: model expects " << p << " features, data has " << data.dim();
      throw InputError(msg.str());
    }
    return data.features;
  }
  std::vector<std::size_t> cols;
  for (const auto& name : model.feature_names) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
    if (it == data.feature_names.end()) throw InputError("dimension mismatch: data lacks feature column '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
  }
  const std::size_t n = data.features.rows();
  Matrix out(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p; ++k) out(i, k) = data.features(i, cols[k]);
  return out;
}

std::vector<PredictionSummary> predict(const Model& model, const Matrix& raw_features,
                                       std::span<const double> levels) {
  if (raw_features.cols() != model.input_dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: model expects " << model.input_dim() << " features, got " << raw_features.cols();
    throw InputError(msg.str());
  }
  const auto lv = normalize_levels(levels);
  Matrix scaled(raw_features.rows(), raw_features.cols());
  for (std::size_t i = 0; i < raw_features.rows(); ++i) model.scaling.apply(raw_features.row(i), scaled.row(i));
  const auto out = kernels::forward_batch(model.prototypes, scaled);

  std::vector<PredictionSummary> res(out.size());
  std::vector<std::string> errors(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out.size()); ++i) {
    const auto r = static_cast<std::size_t>(i);
    try {
      res[r] = summarize(out[r], lv);
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericError(e);
  return res;
}

Evaluation evaluate(const Model& model, const Dataset& data, std::span<const double> levels) {
  if (data.size() == 0) throw InputError("cannot evaluate on an empty dataset");
  const auto summaries = predict(model, select_features(model, data), levels);
  Evaluation ev;
  ev.rows = data.size();
  const auto lv = normalize_levels(levels);
  ev.levels.resize(lv.size());
  for (std::size_t l = 0; l < lv.size(); ++l) ev.levels[l].level = lv[l];
  double se = 0.0;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const double y = data.response[i];
    se += (summaries[i].mean - y) * (summaries[i].mean - y);
    for (std::size_t l = 0; l < lv.size(); ++l) {
      const auto& iv = summaries[i].intervals[l].second;
      if (iv.contains(y)) ev.levels[l].coverage += 1.0;
      ev.levels[l].mean_width += iv.width();
    }
  }
  const double n = static_cast<double>(data.size());
  ev.mse = se / n;
  for (auto& m : ev.levels) {
    m.coverage /= n;
    m.mean_width /= n;
  }
  return ev;
}

}  // namespace ennreg

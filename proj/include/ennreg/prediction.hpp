#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/grfn.hpp"
#include "ennreg/model.hpp"

namespace ennreg {

/// Output Grfn of one input together with its expectation bounds and
/// prediction intervals.
struct PredictionSummary {
  double mean = 0.0;
  double variance = 0.0;
  double precision = 0.0;
  double lower_expectation = 0.0;
  double upper_expectation = 0.0;
  std::vector<std::pair<double, RealInterval>> intervals;  // (level, interval), levels ascending
};

/// Levels must lie in (0, 1); they are sorted and deduplicated.
std::vector<double> normalize_levels(std::span<const double> levels);

PredictionSummary summarize(const Grfn& g, std::span<const double> levels);

/// Summaries for raw feature rows; rows are evaluated in parallel.
std::vector<PredictionSummary> predict(const Model& model, const Matrix& raw_features,
                                       std::span<const double> levels);

struct LevelMetrics {
  double level = 0.0;
  double coverage = 0.0;    // closed intervals: boundary hits count as covered
  double mean_width = 0.0;
};

struct Evaluation {
  std::size_t rows = 0;
  double mse = 0.0;
  std::vector<LevelMetrics> levels;
};

Evaluation evaluate(const Model& model, const Dataset& data, std::span<const double> levels);

/// Picks the model's feature columns out of `data` by name (in model order).
/// Falls back to positional columns when the dataset has no names.
Matrix select_features(const Model& model, const Dataset& data);

}  // namespace ennreg

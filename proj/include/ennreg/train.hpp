#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/grfn.hpp"
#include "ennreg/model.hpp"

namespace ennreg {

enum class OptimizerKind { AdaGrad, Adam };
const char* to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& name);

/// Mini-batch first-order optimization with per-parameter adaptive steps, and
/// early stopping. The moment decays only apply to Adam.
struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::Adam;
  double step_size = 0.01;
  double beta1 = 0.9;   // first-moment decay
  double beta2 = 0.999; // second-moment decay
  std::size_t batch_size = 32;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  double validation_fraction = 0.2;
};

struct TrainConfig {
  std::size_t prototypes = 30;
  double lambda = 0.9;
  double epsilon = 0.01;  // absolute half-width of [y - eps, y + eps]
  double xi = 1e-3;
  OptimizerSettings optimizer;
  /// When set, every prototype scale is initialized to this value and kept
  /// fixed during optimization.
  std::optional<double> fixed_scale;
  std::uint64_t seed = 0;

  void validate() const;
};

/// epsilon = relative * stddev(y), the usual way of resolving it per dataset.
double resolve_epsilon(const Dataset& data, double relative);

enum class StopReason { MaxEpochs, Patience };

const char* to_string(StopReason r);

struct TrainTrace {
  std::vector<double> train_cost;
  std::vector<double> validation_cost;
  double initial_train_cost = 0.0;
  std::size_t best_epoch = 0;  // 1-based, 0 if the initial model was kept
  StopReason stop = StopReason::MaxEpochs;
  std::vector<std::string> warnings;

  std::size_t epochs() const { return train_cost.size(); }

  /// Header "epoch,train_cost,val_cost", one row per epoch.
  void write_csv(std::ostream& out) const;
};

struct FitResult {
  Model model;
  TrainTrace trace;
};

/// Regularized cost of a model on raw (unstandardized) data.
double cost(const Model& model, const Dataset& data, const TrainConfig& cfg);

/// Gradient of cost() with respect to the packed unconstrained parameters (see
/// kernels.hpp for the layout). Data are raw and scaled with the model's
/// scaling.
std::vector<double> gradient(const Model& model, const Dataset& batch, const TrainConfig& cfg);

struct KMeansResult {
  Matrix centers;
  std::vector<std::size_t> assignment;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Stops when no center moves more
/// than 1e-6 or after 100 iterations.
KMeansResult kmeans(const Matrix& x, std::size_t clusters, std::uint64_t seed);

/// Initial prototypes from cluster centers, for standardized features: zero
/// slopes, intercepts at cluster response means, unit precisions.
Model init_params(const Dataset& standardized, const Matrix& centers, const TrainConfig& cfg);

/// Standardizes features, initializes by k-means and minimizes the
/// regularized cost with the configured mini-batch optimizer, keeping the parameters with the best
/// cost on an internal validation split.
FitResult fit(const Dataset& data, const TrainConfig& cfg);

struct CvRow {
  double xi = 0.0;
  double mean_mse = 0.0;
  std::vector<double> fold_mse;
};

struct CvResult {
  double best_xi = 0.0;
  std::vector<CvRow> table;
  std::size_t fits = 0;
};

/// K-fold cross-validation of the regularization coefficient. The selection
/// metric is the mean held-out MSE of the point prediction; ties go to the
/// larger coefficient.
CvResult cross_validate_xi(const Dataset& data, std::span<const double> grid, std::size_t folds,
                           const TrainConfig& cfg);

}  // namespace ennreg

#pragma once

// Prototype-based evidential regression network.
//
// Each prototype j owns a center w_j, a scale gamma_j, a local linear model
// (slope beta_j, intercept alpha_j) and a Grfn variance/precision pair. For an
// input x (in standardized feature space) prototype j contributes the
// evidence N~(beta_j'x + alpha_j, sigma_j^2, a_j(x) h_j) with activation
// a_j(x) = exp(-gamma_j^2 ||x - w_j||^2); the network output is the
// combination of all prototype evidences.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/grfn.hpp"

namespace ennreg {

struct Prototype {
  std::vector<double> center;
  double scale = 1.0;  // enters squared
  std::vector<double> slope;
  double intercept = 0.0;
  double variance = 1.0;
  double precision = 1.0;

  std::size_t dim() const { return center.size(); }
};

/// Training hyperparameters echoed into the model file.
struct Hyperparameters {
  double lambda = 0.9;
  double epsilon = 0.01;
  double xi = 1e-3;
};

struct Model {
  std::vector<Prototype> prototypes;
  FeatureScaling scaling;
  Hyperparameters hyper;
  std::vector<std::string> feature_names;
  std::string response_name = "y";

  std::size_t input_dim() const { return scaling.dim(); }
  std::size_t size() const { return prototypes.size(); }

  /// Throws InputError unless J >= 1, all dimensions agree, variances are
  /// positive, precisions nonnegative and stored stddevs positive.
  void validate() const;
};

/// exp(-gamma^2 ||x - w||^2).
double activation(const Prototype& proto, std::span<const double> x);

/// N~(beta'x + alpha, sigma^2, activation * h).
Grfn prototype_grfn(const Prototype& proto, std::span<const double> x);

/// Combined evidence for an input already in standardized feature space.
/// Uses the closed-form sums, normalized in log space so that the mean and
/// variance stay defined where every activation underflows. If no prototype
/// carries evidence the result is vacuous with the first prototype's mean and
/// variance.
Grfn forward_standardized(std::span<const Prototype> prototypes, std::span<const double> x);

/// Standardizes raw features with the model's scaling, then forwards.
Grfn forward(const Model& model, std::span<const double> raw_x);

/// Sum of prototype precisions.
double total_precision(const Model& model);

// Text persistence. The first line is the format id and version; values are
// written with round-trip precision.
inline constexpr const char* kModelFormatId = "ennreg-model";
inline constexpr int kModelFormatVersion = 1;

void save_model(const Model& model, std::ostream& out);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

}  // namespace ennreg

#include "ennreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ennreg/errors.hpp"

namespace ennreg {

namespace {

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    std::ostringstream msg;
    msg << "dimension mismatch: expected " << expected << " features, got " << got;
    throw InputError(msg.str());
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d += diff * diff;
  }
  return d;
}

double local_mean(const Prototype& proto, std::span<const double> x) {
  double m = proto.intercept;
  for (std::size_t k = 0; k < x.size(); ++k) m += proto.slope[k] * x[k];
  return m;
}

}  // namespace

void Model::validate() const {
  if (prototypes.empty()) throw InputError("model has no prototypes");
  const std::size_t p = input_dim();
  if (scaling.stddev.size() != p) throw InputError("scaling mean/stddev length mismatch");
  for (const double s : scaling.stddev)
    if (!(s > 0.0)) throw InputError("stored feature stddev must be positive");
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    const auto& pr = prototypes[j];
    if (pr.center.size() != p || pr.slope.size() != p) {
      std::ostringstream msg;
      msg << "prototype " << j << " dimension does not match input dimension " << p;
      throw InputError(msg.str());
    }
    if (!(pr.variance > 0.0)) throw InputError("prototype variance must be positive");
    if (!(pr.precision >= 0.0)) throw InputError("prototype precision must be nonnegative");
  }
}

double activation(const Prototype& proto, std::span<const double> x) {
  check_dim(proto.dim(), x.size());
  return std::exp(-proto.scale * proto.scale * squared_distance(x, proto.center));
}

Grfn prototype_grfn(const Prototype& proto, std::span<const double> x) {
  check_dim(proto.dim(), x.size());
  return {local_mean(proto, x), proto.variance, activation(proto, x) * proto.precision};
}

Grfn forward_standardized(std::span<const Prototype> prototypes, std::span<const double> x) {
  if (prototypes.empty()) throw InputError("model has no prototypes");
  check_dim(prototypes.front().dim(), x.size());

  // log(a_j h_j) for prototypes carrying evidence.
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> log_weight(prototypes.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    const auto& pr = prototypes[j];
    check_dim(pr.dim(), x.size());
    if (pr.precision > 0.0) {
      log_weight[j] = std::log(pr.precision) - pr.scale * pr.scale * squared_distance(x, pr.center);
      top = std::max(top, log_weight[j]);
    }
  }
  if (top == -std::numeric_limits<double>::infinity())
    return {local_mean(prototypes.front(), x), prototypes.front().variance, 0.0};

  double sum = 0.0;
  double weighted_mean = 0.0;
  double weighted_var = 0.0;
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    if (log_weight[j] == -std::numeric_limits<double>::infinity()) continue;
    const double w = std::exp(log_weight[j] - top);
    sum += w;
    weighted_mean += w * local_mean(prototypes[j], x);
    weighted_var += w * w * prototypes[j].variance;
  }
  return {weighted_mean / sum, weighted_var / (sum * sum), std::exp(top) * sum};
}

Grfn forward(const Model& model, std::span<const double> raw_x) {
  check_dim(model.input_dim(), raw_x.size());
  const auto x = model.scaling.apply(raw_x);
  return forward_standardized(model.prototypes, x);
}

double total_precision(const Model& model) {
  double s = 0.0;
  for (const auto& p : model.prototypes) s += p.precision;
  return s;
}

}  // namespace ennreg

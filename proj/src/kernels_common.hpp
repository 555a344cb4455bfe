#pragma once

#include <cmath>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/kernels.hpp"
#include "ennreg/loss.hpp"

namespace ennreg::kernels::detail {

// Per-sample scratch reused across rows.
struct SampleWorkspace {
  std::vector<double> sq_dist;
  std::vector<double> act;
  std::vector<double> evidence;
  std::vector<double> local_mean;

  explicit SampleWorkspace(std::size_t prototypes)
      : sq_dist(prototypes), act(prototypes), evidence(prototypes), local_mean(prototypes) {}
};

// Adds the loss gradient of one sample to `grad` (packed layout) and returns
// the loss.
inline double accumulate_sample(std::span<const Prototype> protos, std::span<const double> x, double y,
                                const CostSettings& s, std::span<double> grad, SampleWorkspace& ws) {
  const std::size_t J = protos.size();
  const std::size_t p = x.size();
  const BlockOffsets off = block_offsets(p);

  double total = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const auto& pr = protos[j];
    double d = 0.0;
    double m = pr.intercept;
    for (std::size_t k = 0; k < p; ++k) {
      const double diff = x[k] - pr.center[k];
      d += diff * diff;
      m += pr.slope[k] * x[k];
    }
    ws.sq_dist[j] = d;
    ws.local_mean[j] = m;
    ws.act[j] = std::exp(-pr.scale * pr.scale * d);
    ws.evidence[j] = ws.act[j] * pr.precision;
    total += ws.evidence[j];
  }
  if (!(total > 0.0)) {
    // No evidence reaches this sample: the loss is flat in every parameter.
    return loss(y, Grfn{ws.local_mean[0], protos[0].variance, 0.0}, s.lambda, s.epsilon);
  }

  double mean = 0.0;
  double var = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double w = ws.evidence[j] / total;
    mean += w * ws.local_mean[j];
    var += w * w * protos[j].variance;
  }

  const LossGradient lg = loss_with_gradient(y, Grfn{mean, var, total}, s.lambda, s.epsilon);

  for (std::size_t j = 0; j < J; ++j) {
    const auto& pr = protos[j];
    const double w = ws.evidence[j] / total;
    // dL/d(evidence_j)
    const double d_evidence =
        (lg.d_mean * (ws.local_mean[j] - mean) + 2.0 * lg.d_variance * (w * pr.variance - var)) / total +
        lg.d_precision;
    // evidence_j * dL/d(evidence_j); activation-path derivatives are
    // proportional to it.
    const double g_act = d_evidence * ws.evidence[j];
    const double d_local_mean = lg.d_mean * w;

    double* block = grad.data() + j * off.size;
    const double s2 = pr.scale * pr.scale;
    for (std::size_t k = 0; k < p; ++k) {
      block[off.center + k] += g_act * 2.0 * s2 * (x[k] - pr.center[k]);
      block[off.slope + k] += d_local_mean * x[k];
    }
    block[off.scale] += g_act * (-2.0 * pr.scale * ws.sq_dist[j]);
    block[off.intercept] += d_local_mean;
    block[off.log_variance] += lg.d_variance * w * w * pr.variance;
    block[off.sqrt_precision] += d_evidence * ws.act[j] * 2.0 * std::sqrt(pr.precision);
  }
  return lg.value;
}

inline double regularizer(std::span<const Prototype> protos, double xi) {
  double s = 0.0;
  for (const auto& pr : protos) s += pr.precision;
  return xi / static_cast<double>(protos.size()) * s;
}

// Gradient of the regularizer in sqrt-precision coordinates, plus the mean
// over rows of the accumulated per-sample gradient.
inline void finish_gradient(std::span<const Prototype> protos, std::size_t dim, double xi,
                            std::size_t rows, std::vector<double>& grad) {
  const BlockOffsets off = block_offsets(dim);
  const double inv_n = 1.0 / static_cast<double>(rows);
  for (double& g : grad) g *= inv_n;
  const double reg = xi / static_cast<double>(protos.size());
  for (std::size_t j = 0; j < protos.size(); ++j)
    grad[j * off.size + off.sqrt_precision] += reg * 2.0 * std::sqrt(protos[j].precision);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      std::ostringstream msg;
      msg << "non-finite gradient at parameter " << i << " (prototype " << i / off.size << ", offset "
          << i % off.size << ")";
      throw NumericError(msg.str());
    }
  }
}

inline void check_rows(std::span<const Prototype> protos, const Matrix& x, std::span<const double> y,
                       std::span<const std::size_t> rows) {
  if (protos.empty()) throw InputError("no prototypes");
  if (rows.empty()) throw InputError("cost needs at least one row");
  if (x.rows() != y.size()) throw InputError("feature and response row counts differ");
  if (x.cols() != protos.front().dim()) throw InputError("feature dimension does not match prototypes");
}

}  // namespace ennreg::kernels::detail

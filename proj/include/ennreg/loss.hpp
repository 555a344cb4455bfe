#pragma once

#include "ennreg/grfn.hpp"

namespace ennreg {

/// Belief is floored here before taking its logarithm, so that vacuous
/// evidence produces a large but finite loss.
inline constexpr double kBeliefFloor = 1e-300;

/// -lambda ln Bel([y-eps, y+eps]) - (1-lambda) ln Pl([y-eps, y+eps]).
double loss(double y, const Grfn& g, double lambda, double epsilon);

/// Loss value with its partial derivatives in the Grfn parameters. The
/// derivatives are exact (forward-mode differentiation of the closed form)
/// for 0 < precision < inf and variance > 0; elsewhere they are reported as 0.
struct LossGradient {
  double value = 0.0;
  double d_mean = 0.0;
  double d_variance = 0.0;
  double d_precision = 0.0;
};

LossGradient loss_with_gradient(double y, const Grfn& g, double lambda, double epsilon);

}  // namespace ennreg

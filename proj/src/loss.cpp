#include "ennreg/loss.hpp"

#include <algorithm>
#include <cmath>

#include "dual.hpp"
#include "interval_formulas.hpp"

namespace ennreg {

namespace {

template <class T>
T log_measure_loss(const T& bel, const T& pl, double lambda) {
  using std::log;
  T out(0.0);
  if (lambda > 0.0) {
    out = detail::value_of(bel) > kBeliefFloor ? out - lambda * log(bel) : out - lambda * std::log(kBeliefFloor);
  }
  if (lambda < 1.0) {
    out = detail::value_of(pl) > kBeliefFloor ? out - (1.0 - lambda) * log(pl)
                                               : out - (1.0 - lambda) * std::log(kBeliefFloor);
  }
  return out;
}

}  // namespace

double loss(double y, const Grfn& g, double lambda, double epsilon) {
  const RealInterval iv{y - epsilon, y + epsilon};
  return log_measure_loss(belief(g, iv), plausibility(g, iv), lambda);
}

LossGradient loss_with_gradient(double y, const Grfn& g, double lambda, double epsilon) {
  const bool general = g.precision > 0.0 && g.precision < kInfinitePrecision && g.variance > 0.0;
  if (!general) return {loss(y, g, lambda, epsilon), 0.0, 0.0, 0.0};

  using D = detail::Dual<3>;
  const D mean = D::variable(g.mean, 0);
  const D var = D::variable(g.variance, 1);
  const D prec = D::variable(g.precision, 2);
  const auto m = detail::interval_measures(mean, var, prec, y - epsilon, y + epsilon);

  // Same clamping as belief()/plausibility(); a clamped value has zero slope.
  D pl = m.plausibility;
  if (pl.value > 1.0) pl = D(1.0);
  D bel = m.belief;
  if (bel.value > pl.value) bel = pl;
  if (bel.value < 0.0) bel = D(0.0);

  const D l = log_measure_loss(bel, pl, lambda);
  return {l.value, l.grad[0], l.grad[1], l.grad[2]};
}

}  // namespace ennreg

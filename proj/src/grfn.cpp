#include "ennreg/grfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/normal.hpp"
#include "interval_formulas.hpp"

namespace ennreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Possibility of the interval when the mode is fixed at m.
double possibility_outside(double m, double precision, const RealInterval& iv) {
  if (iv.contains(m)) return 1.0;
  const double d = m < iv.lo ? iv.lo - m : m - iv.hi;
  return std::exp(-0.5 * precision * d * d);
}

void check_interval(const RealInterval& iv) {
  if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
    std::ostringstream msg;
    msg << "invalid interval [" << iv.lo << ", " << iv.hi << "]";
    throw InputError(msg.str());
  }
}

double effective_spread(const Grfn& g) {
  return std::sqrt(g.variance + 1.0 / std::max(g.precision, 1e-6));
}

template <class Cdf>
double invert_cdf(const Grfn& g, double p, Cdf cdf) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("quantile level must lie in (0, 1)");
  if (g.is_vacuous()) throw UnboundedQuantileError("quantile of vacuous evidence is unbounded");
  if (g.is_gaussian() && g.variance == 0.0) return g.mean;

  const double spread = effective_spread(g);
  double half = 8.0 * spread;
  double lo = g.mean - half;
  while (cdf(lo) > p) {
    half *= 2.0;
    lo = g.mean - half;
    if (!std::isfinite(lo)) throw UnboundedQuantileError("quantile bracket diverged below");
  }
  half = 8.0 * spread;
  double hi = g.mean + half;
  while (cdf(hi) < p) {
    half *= 2.0;
    hi = g.mean + half;
    if (!std::isfinite(hi)) throw UnboundedQuantileError("quantile bracket diverged above");
  }

  double f_lo = cdf(lo);
  double f_hi = cdf(hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = cdf(mid);
    if (f_mid == p) return mid;
    if (f_mid < p) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double best = (p - f_lo) <= (f_hi - p) ? lo : hi;
  if (std::abs(cdf(best) - p) > 1e-8) {
    std::ostringstream msg;
    msg << "quantile bisection did not converge for p=" << p;
    throw NumericError(msg.str());
  }
  return best;
}

}  // namespace

bool RealInterval::is_bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

void validate(const Grfn& g) {
  if (std::isnan(g.mean) || !std::isfinite(g.mean)) throw InputError("Grfn mean must be finite");
  if (!(g.variance >= 0.0) || !std::isfinite(g.variance))
    throw InputError("Grfn variance must be finite and nonnegative");
  if (!(g.precision >= 0.0)) throw InputError("Grfn precision must be nonnegative");
}

double membership(const Gfn& g, double x) {
  if (g.precision == 0.0) return 1.0;
  if (g.precision == kInf) return x == g.mode ? 1.0 : 0.0;
  const double d = x - g.mode;
  return std::exp(-0.5 * g.precision * d * d);
}

Gfn product(const Gfn& a, const Gfn& b) {
  if (a.precision == 0.0 && b.precision == 0.0) return {a.mode, 0.0};
  if (a.precision == kInf && b.precision == kInf) return {0.5 * (a.mode + b.mode), kInf};
  if (a.precision == kInf) return a;
  if (b.precision == kInf) return b;
  const double h = a.precision + b.precision;
  return {(a.precision * a.mode + b.precision * b.mode) / h, h};
}

Grfn combine(const Grfn& a, const Grfn& b) {
  if (a.is_vacuous() && b.is_vacuous()) return {a.mean, a.variance, 0.0};
  if (a.is_vacuous()) return b;
  if (b.is_vacuous()) return a;
  // Equal infinite rates: the limit of h1 = h2 -> inf.
  if (a.is_gaussian() && b.is_gaussian())
    return {0.5 * (a.mean + b.mean), 0.25 * (a.variance + b.variance), kInf};
  if (a.is_gaussian()) return a;
  if (b.is_gaussian()) return b;

  const double h = a.precision + b.precision;
  const double wa = a.precision / h;
  const double wb = b.precision / h;
  return {wa * a.mean + wb * b.mean, wa * wa * a.variance + wb * wb * b.variance, h};
}

double contour(const Grfn& g, double x) {
  if (g.is_vacuous()) return 1.0;
  if (g.is_gaussian()) return (g.variance == 0.0 && x == g.mean) ? 1.0 : 0.0;
  const double inflation = 1.0 + g.precision * g.variance;
  const double d = x - g.mean;
  return std::exp(-g.precision * d * d / (2.0 * inflation)) / std::sqrt(inflation);
}

double upper_cdf(const Grfn& g, double y) {
  if (y == kInf) return 1.0;
  if (y == -kInf) return 0.0;
  if (g.is_vacuous()) return 1.0;
  if (g.variance == 0.0) {
    if (g.is_gaussian()) return y >= g.mean ? 1.0 : 0.0;
    if (y >= g.mean) return 1.0;
    const double d = g.mean - y;
    return std::exp(-0.5 * g.precision * d * d);
  }
  const double sd = std::sqrt(g.variance);
  const double z = (y - g.mean) / sd;
  if (g.is_gaussian()) return normal_cdf(z);
  const double inflation = 1.0 + g.precision * g.variance;
  return clamp01(normal_cdf(z) + contour(g, y) * normal_sf(z / std::sqrt(inflation)));
}

double lower_cdf(const Grfn& g, double y) {
  if (y == kInf) return 1.0;
  if (y == -kInf) return 0.0;
  if (g.is_vacuous()) return 0.0;
  if (g.variance == 0.0) {
    if (g.is_gaussian()) return y >= g.mean ? 1.0 : 0.0;
    if (y <= g.mean) return 0.0;
    const double d = y - g.mean;
    return -std::expm1(-0.5 * g.precision * d * d);
  }
  const double sd = std::sqrt(g.variance);
  const double z = (y - g.mean) / sd;
  if (g.is_gaussian()) return normal_cdf(z);
  const double inflation = 1.0 + g.precision * g.variance;
  return clamp01(normal_cdf(z) - contour(g, y) * normal_cdf(z / std::sqrt(inflation)));
}

double plausibility(const Grfn& g, const RealInterval& iv) {
  check_interval(iv);
  if (g.is_vacuous()) return 1.0;
  if (g.variance == 0.0) {
    if (g.is_gaussian()) return iv.contains(g.mean) ? 1.0 : 0.0;
    return possibility_outside(g.mean, g.precision, iv);
  }
  if (g.is_gaussian()) {
    const double sd = std::sqrt(g.variance);
    return normal_prob((iv.lo - g.mean) / sd, (iv.hi - g.mean) / sd);
  }
  if (!std::isfinite(iv.lo) && !std::isfinite(iv.hi)) return 1.0;
  if (!std::isfinite(iv.lo)) return upper_cdf(g, iv.hi);
  if (!std::isfinite(iv.hi)) return 1.0 - lower_cdf(g, iv.lo);
  const auto m = detail::interval_measures(g.mean, g.variance, g.precision, iv.lo, iv.hi);
  return clamp01(m.plausibility);
}

double belief(const Grfn& g, const RealInterval& iv) {
  check_interval(iv);
  if (!std::isfinite(iv.lo) && !std::isfinite(iv.hi)) return 1.0;
  if (g.is_vacuous()) return 0.0;
  if (g.variance == 0.0) {
    if (g.is_gaussian()) return iv.contains(g.mean) ? 1.0 : 0.0;
    if (!iv.contains(g.mean)) return 0.0;
    const double d = std::min(g.mean - iv.lo, iv.hi - g.mean);
    return -std::expm1(-0.5 * g.precision * d * d);
  }
  if (g.is_gaussian()) {
    const double sd = std::sqrt(g.variance);
    return normal_prob((iv.lo - g.mean) / sd, (iv.hi - g.mean) / sd);
  }
  if (!std::isfinite(iv.lo)) return lower_cdf(g, iv.hi);
  if (!std::isfinite(iv.hi)) return 1.0 - upper_cdf(g, iv.lo);
  const auto m = detail::interval_measures(g.mean, g.variance, g.precision, iv.lo, iv.hi);
  const double pl = clamp01(m.plausibility);
  return std::clamp(m.belief, 0.0, pl);
}

double upper_quantile(const Grfn& g, double p) {
  return invert_cdf(g, p, [&g](double y) { return upper_cdf(g, y); });
}

double lower_quantile(const Grfn& g, double p) {
  return invert_cdf(g, p, [&g](double y) { return lower_cdf(g, y); });
}

double lower_expectation(const Grfn& g) {
  if (g.is_vacuous()) return -kInf;
  if (g.is_gaussian()) return g.mean;
  return g.mean - std::sqrt(std::numbers::pi / (2.0 * g.precision));
}

double upper_expectation(const Grfn& g) {
  if (g.is_vacuous()) return kInf;
  if (g.is_gaussian()) return g.mean;
  return g.mean + std::sqrt(std::numbers::pi / (2.0 * g.precision));
}

RealInterval prediction_interval(const Grfn& g, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("prediction level must lie in (0, 1)");
  if (g.is_vacuous()) return {-kInf, kInf};
  const double alpha = 1.0 - level;
  RealInterval iv;
  try {
    iv.lo = upper_quantile(g, 0.5 * alpha);
  } catch (const UnboundedQuantileError&) {
    iv.lo = -kInf;
  }
  try {
    iv.hi = lower_quantile(g, 1.0 - 0.5 * alpha);
  } catch (const UnboundedQuantileError&) {
    iv.hi = kInf;
  }
  return iv;
}

}  // namespace ennreg

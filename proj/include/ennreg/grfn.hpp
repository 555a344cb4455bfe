#pragma once

// Gaussian fuzzy numbers and Gaussian random fuzzy numbers.
//
// A Gaussian random fuzzy number N~(mean, variance, precision) is a Gaussian
// possibility distribution whose mode is itself a Gaussian random variable.
// The variance carries probabilistic (aleatory) uncertainty, the precision
// carries possibilistic (epistemic) uncertainty. Precision 0 is total
// ignorance, precision +inf is an ordinary normal distribution.
//
// Everything here is a pure function over small value types.

#include <limits>

namespace ennreg {

inline constexpr double kInfinitePrecision = std::numeric_limits<double>::infinity();

/// Gaussian fuzzy number with membership exp(-precision/2 (x - mode)^2).
struct Gfn {
  double mode = 0.0;
  double precision = 0.0;
};

struct Grfn {
  double mean = 0.0;
  double variance = 0.0;
  double precision = 0.0;

  bool is_vacuous() const { return precision == 0.0; }
  bool is_gaussian() const { return precision == kInfinitePrecision; }
};

/// Closed real interval; either end may be infinite.
struct RealInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double y) const { return lo <= y && y <= hi; }
  bool contains(const RealInterval& other) const { return lo <= other.lo && other.hi <= hi; }
  double width() const { return hi - lo; }
  bool is_bounded() const;
};

/// Throws InputError for negative or NaN parameters.
void validate(const Grfn& g);

double membership(const Gfn& g, double x);

/// Normalized product intersection. Two vacuous operands yield the first
/// operand's mode with zero precision.
Gfn product(const Gfn& a, const Gfn& b);

/// Generalized product-intersection rule with hard normalization. Precisions
/// add, means are precision-weighted, variances are weighted by squared
/// precisions. Two vacuous operands yield (a.mean, a.variance, 0).
Grfn combine(const Grfn& a, const Grfn& b);

/// Contour (point plausibility) function pl(x).
double contour(const Grfn& g, double x);

/// Plausibility and belief of a closed interval. Infinite ends are allowed and
/// are evaluated through the CDF bounds.
double plausibility(const Grfn& g, const RealInterval& iv);
double belief(const Grfn& g, const RealInterval& iv);

/// Upper CDF Pl((-inf, y]) and lower CDF Bel((-inf, y]).
double upper_cdf(const Grfn& g, double y);
double lower_cdf(const Grfn& g, double y);

/// Inverses of the CDF bounds by bracketed bisection. p must lie in (0, 1).
/// Throws UnboundedQuantileError when the CDF never reaches p (vacuous
/// evidence) and NumericError if bisection fails to converge.
double upper_quantile(const Grfn& g, double p);
double lower_quantile(const Grfn& g, double p);

/// mean -/+ sqrt(pi / (2 precision)).
double lower_expectation(const Grfn& g);
double upper_expectation(const Grfn& g);

/// [upper_quantile(alpha/2), lower_quantile(1 - alpha/2)] with
/// alpha = 1 - level. Vacuous evidence gives (-inf, +inf).
RealInterval prediction_interval(const Grfn& g, double level);

}  // namespace ennreg

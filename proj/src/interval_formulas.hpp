#pragma once

// Closed-form plausibility and belief of a bounded interval [x, y] for a Grfn
// with 0 < precision < inf and variance > 0. Templated so the same expression
// yields values (double) and parameter derivatives (Dual).

#include <cmath>

#include "ennreg/normal.hpp"

namespace ennreg::detail {

inline double value_of(double x) { return x; }

// 16-point Gauss-Legendre rule on [0, length]; f takes the offset from 0.
template <class T, class F>
T gauss_legendre(const T& length, F f) {
  static constexpr double kNodes[8] = {0.09501250983763745, 0.2816035507792589, 0.45801677765722737,
                                       0.6178762444026438,  0.755404408355003,  0.8656312023878318,
                                       0.9445750230732326,  0.9894009349916499};
  static constexpr double kWeights[8] = {0.18945061045506859, 0.1826034150449236,  0.16915651939500262,
                                         0.14959598881657676, 0.12462897125553403, 0.09515851168249259,
                                         0.062253523938647706, 0.027152459411754037};
  T total = 0.0 * length;
  for (int i = 0; i < 8; ++i)
    for (double t : {-kNodes[i], kNodes[i]}) total = total + kWeights[i] * f(0.5 * (1.0 + t) * length);
  return 0.5 * length * total;
}

// Integral over d in [0, length] of (1 - exp(-h d^2 / 2)) times the mode
// density at anchor + direction * d. Accurate when h length^2 is small and
// length is at most a few sigma.
template <class T>
T endpoint_necessity(const T& mean, const T& sd, const T& precision, double anchor, const T& length,
                     double direction) {
  using std::exp;
  using std::expm1;
  return gauss_legendre(length, [&](const T& d) {
           const T z = (anchor + direction * d - mean) / sd;
           return -expm1(-0.5 * precision * d * d) * exp(-0.5 * z * z);
         }) /
         (sd * 2.5066282746310002);
}

// Mode mass on [start, start + width]; integrates the density directly when
// the width is small so the difference of two cdf values is never formed.
template <class T>
T mode_mass(const T& mean, const T& sd, const T& start, const T& width) {
  using std::exp;
  using ennreg::normal_prob;
  if (!(value_of(width) > 0.0)) return 0.0 * width;
  if (value_of(width) > value_of(sd)) return normal_prob((start - mean) / sd, (start + width - mean) / sd);
  return gauss_legendre(width, [&](const T& d) {
           const T z = (start + d - mean) / sd;
           return exp(-0.5 * z * z);
         }) /
         (sd * 2.5066282746310002);
}

template <class T>
struct IntervalMeasures {
  T plausibility;
  T belief;
};

template <class T>
IntervalMeasures<T> interval_measures(const T& mean, const T& variance, const T& precision, double x,
                                      double y) {
  using std::exp;
  using std::sqrt;
  using ennreg::normal_cdf;
  using ennreg::normal_prob;
  using ennreg::normal_sf;

  const T sd = sqrt(variance);
  const T inflation = 1.0 + precision * variance;
  const T spread = sd * sqrt(inflation);
  const T pl_norm = 1.0 / sqrt(inflation);

  const T dx = x - mean;
  const T dy = y - mean;
  const T pl_x = pl_norm * exp(-(precision * dx * dx) / (2.0 * inflation));
  const T pl_y = pl_norm * exp(-(precision * dy * dy) / (2.0 * inflation));

  const T mode_inside = normal_prob(dx / sd, dy / sd);
  const T ax = dx / spread;
  const T ay = dy / spread;
  const T plaus = mode_inside + pl_x * normal_cdf(ax) + pl_y * normal_sf(ay);

  // Closed-form belief rearranged into nonnegative pieces that keep their
  // digits in the tails: the mode mass strictly between the points bx, by
  // plus, next to each endpoint, the necessity integral over a piece of length
  // w / (1 + h sigma^2).
  const double w = 0.5 * (y - x);
  const T piece = w / inflation;
  const T bx = x + piece;
  const T by = y - piece;
  const T middle = mode_mass(mean, sd, bx, 2.0 * w * precision * variance / inflation);
  T near_x, near_y;
  if (value_of(precision * piece * piece) < 1.0 && value_of(piece) <= 4.0 * value_of(sd)) {
    near_x = endpoint_necessity(mean, sd, precision, x, piece, 1.0);
    near_y = endpoint_necessity(mean, sd, precision, y, piece, -1.0);
  } else {
    const T amid = (0.5 * (x + y) - mean) / spread;
    near_x = normal_prob(dx / sd, (bx - mean) / sd) - pl_x * normal_prob(ax, amid);
    near_y = normal_prob((by - mean) / sd, dy / sd) - pl_y * normal_prob(amid, ay);
  }
  const T bel = near_x + middle + near_y;
  return {plaus, bel};
}

}  // namespace ennreg::detail

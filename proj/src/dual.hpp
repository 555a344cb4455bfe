#pragma once

// Forward-mode dual number with a fixed number of tangent directions. Used to
// differentiate the interval formulas with respect to the three Grfn
// parameters without duplicating them by hand.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "ennreg/normal.hpp"

namespace ennreg::detail {

template <std::size_t N>
struct Dual {
  double value = 0.0;
  std::array<double, N> grad{};

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT: implicit constants are the point

  static Dual variable(double v, std::size_t index) {
    Dual d(v);
    d.grad[index] = 1.0;
    return d;
  }
};

template <std::size_t N>
Dual<N> chain(const Dual<N>& x, double value, double derivative) {
  Dual<N> r(value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = derivative * x.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> operator-(const Dual<N>& a) {
  return chain(a, -a.value, -1.0);
}

template <std::size_t N>
Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value + b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value - b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value * b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  const double q = a.value / b.value;
  Dual<N> r(q);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
  return r;
}

template <std::size_t N> Dual<N> operator+(const Dual<N>& a, double b) { return a + Dual<N>(b); }
template <std::size_t N> Dual<N> operator+(double a, const Dual<N>& b) { return Dual<N>(a) + b; }
template <std::size_t N> Dual<N> operator-(const Dual<N>& a, double b) { return a - Dual<N>(b); }
template <std::size_t N> Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <std::size_t N> Dual<N> operator*(const Dual<N>& a, double b) { return chain(a, a.value * b, b); }
template <std::size_t N> Dual<N> operator*(double a, const Dual<N>& b) { return chain(b, a * b.value, a); }
template <std::size_t N> Dual<N> operator/(const Dual<N>& a, double b) { return chain(a, a.value / b, 1.0 / b); }
template <std::size_t N> Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

template <std::size_t N>
Dual<N> exp(const Dual<N>& x) {
  const double e = std::exp(x.value);
  return chain(x, e, e);
}

template <std::size_t N>
Dual<N> expm1(const Dual<N>& x) {
  return chain(x, std::expm1(x.value), std::exp(x.value));
}

template <std::size_t N>
Dual<N> log(const Dual<N>& x) {
  return chain(x, std::log(x.value), 1.0 / x.value);
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& x) {
  const double s = std::sqrt(x.value);
  return chain(x, s, 0.5 / s);
}

template <std::size_t N>
Dual<N> normal_cdf(const Dual<N>& z) {
  return chain(z, ennreg::normal_cdf(z.value), ennreg::normal_pdf(z.value));
}

template <std::size_t N>
Dual<N> normal_sf(const Dual<N>& z) {
  return chain(z, ennreg::normal_sf(z.value), -ennreg::normal_pdf(z.value));
}

template <std::size_t N>
Dual<N> normal_prob(const Dual<N>& a, const Dual<N>& b) {
  if (!(a.value < b.value)) return Dual<N>(0.0);
  if (a.value > 0.0) return normal_sf(a) - normal_sf(b);
  return normal_cdf(b) - normal_cdf(a);
}

template <std::size_t N>
double value_of(const Dual<N>& x) {
  return x.value;
}

}  // namespace ennreg::detail

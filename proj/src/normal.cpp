#include "ennreg/normal.hpp"

#include <cmath>
#include <numbers>

namespace ennreg {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double normal_prob(double a, double b) {
  if (!(a < b)) return 0.0;
  if (a > 0.0) return normal_sf(a) - normal_sf(b);
  return normal_cdf(b) - normal_cdf(a);
}

}  // namespace ennreg

#pragma once

namespace ennreg {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF, evaluated through erfc so that the lower tail keeps
/// full relative accuracy.
double normal_cdf(double z);

/// Upper tail 1 - normal_cdf(z), accurate for large positive z.
double normal_sf(double z);

/// P(a <= Z <= b) for standard normal Z and a <= b. Chooses the tail that
/// avoids subtracting two values close to one.
double normal_prob(double a, double b);

}  // namespace ennreg

#pragma once

namespace qnet {

// Special functions implemented in-repo so that p-values are reproducible
// bit-for-bit across builds of this tool, independent of the platform's
// libm-provided distribution functions.

// Natural log of the gamma function, x > 0. Lanczos approximation (g = 7),
// relative error below 1e-13 over the range used here.
double log_gamma(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Standard normal CDF. Absolute error below 1e-10 (in practice ~1e-15),
// evaluated through the incomplete gamma function.
double std_normal_cdf(double x);

// Two-sided p-value of a standard normal statistic: 2 * Phi(-|z|).
double two_sided_normal_p(double z);

// Upper tail of the chi-square distribution with k >= 1 degrees of freedom
// at x >= 0. Absolute error below 1e-9.
double chi_square_sf(double x, int k);

}  // namespace qnet

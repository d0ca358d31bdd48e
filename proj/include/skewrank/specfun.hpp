#pragma once

// Scalar special functions for Gaussian and skew-normal probability:
// univariate normal pdf/cdf/quantile, Owen's T, bivariate normal cdf,
// skew-normal cdf, and the regularized incomplete gamma pair with inverse.
// All functions are pure and thread-safe.

namespace skewrank {

// Standard normal density.
double norm_pdf(double x);

// Standard normal cdf. Accepts +-infinity.
double norm_cdf(double x);

// Inverse of norm_cdf on (0, 1). Throws std::domain_error outside (0, 1).
double norm_quantile(double u);

// Owen's T function T(h, a) = (2*pi)^-1 * int_0^a exp(-h^2(1+t^2)/2)/(1+t^2) dt.
// Accepts a = +-infinity. Odd in a, even in h, |T| <= 1/4.
double owen_t(double h, double a);

// P(X1 <= x1, X2 <= x2) for standard bivariate normal with correlation rho,
// rho in [-1, 1]. Accepts infinite arguments.
double bvn_cdf(double x1, double x2, double rho);

// Skew-normal cdf with shape alpha: Phi(x) - 2*T(x, alpha).
double skew_norm_cdf(double x, double alpha);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a), a > 0,
// x >= 0. Q(a, 0) = 1, decreasing in x.
double reg_gamma_upper(double a, double x);

// Lower counterpart P(a, x) = 1 - Q(a, x).
double reg_gamma_lower(double a, double x);

// Solves Q(a, x) = u for x, u in (0, 1). Throws std::domain_error outside.
double reg_gamma_upper_inv(double a, double u);

// Solves P(a, x) = u for x, u in (0, 1).
double reg_gamma_lower_inv(double a, double u);

}  // namespace skewrank

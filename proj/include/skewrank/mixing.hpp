#pragma once

// Nonnegative mixing distributions entering the location-scale and
// skew-normal scale mixtures: point mass at 1, Gamma, and InverseGamma, all
// driven through their quantile functions so QMC points map straight to
// mixing draws. The generalized inverse Gaussian density is provided for
// reference; its quantile is not implemented.

namespace skewrank {

enum class MixingKind { Degenerate, Gamma, InverseGamma };

// shape/rate are ignored for Degenerate. Gamma(shape, rate) has density
// proportional to x^(shape-1) exp(-rate*x); InverseGamma(shape, rate) is the
// law of 1/G for G ~ Gamma(shape, rate), cdf Q(shape, rate/x).
struct MixingSpec {
  MixingKind kind = MixingKind::Degenerate;
  double shape = 0.0;
  double rate = 0.0;
};

MixingSpec degenerate_mixing();
MixingSpec gamma_mixing(double shape, double rate);
MixingSpec inverse_gamma_mixing(double shape, double rate);

// InverseGamma(nu/2, nu/2): the mixing law that turns a normal scale mixture
// into a Student t with nu degrees of freedom.
MixingSpec ig_from_dof(double nu);

// Quantile of the mixing law at u in (0, 1). Degenerate returns 1 for every
// u. Throws std::domain_error for u outside (0, 1).
double quantile(const MixingSpec& spec, double u);

// Cdf of the mixing law at x > 0 (used by tests and the reciprocal-law
// checks; Degenerate is a step at 1).
double mixing_cdf(const MixingSpec& spec, double x);

// Generalized inverse Gaussian density
//   f(x) = (psi/chi)^(lambda/2) / (2 K_lambda(sqrt(psi*chi)))
//          * x^(lambda-1) exp(-(psi*x + chi/x)/2),  x > 0,
// for the interior case chi > 0, psi > 0 (the gamma / inverse-gamma
// boundaries are the chi -> 0 / psi -> 0 limits and are represented by the
// MixingSpec kinds above). Throws std::domain_error off the interior domain.
double gig_pdf(double lambda, double chi, double psi, double x);

namespace detail {
// Modified Bessel function of the second kind, order lambda (symmetric in
// lambda), exposed for validation of the gig_pdf normalization.
double bessel_k(double lambda, double x);
}  // namespace detail

}  // namespace skewrank

#include "skewrank/mixing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "skewrank/errors.hpp"
#include "skewrank/specfun.hpp"

namespace skewrank {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651;

// I_nu by its ascending series; converges for every x, used only for x <= 10
// where no cancellation is hidden inside the sum itself.
double bessel_i_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum;
}

// K_0 and K_1 by their logarithmic series (Abramowitz & Stegun 9.6.11/13).
double bessel_k0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;  // (x^2/4)^k / (k!)^2
  double harmonic = 0.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * k);
    harmonic += 1.0 / k;
    sum += term * harmonic;
    if (term * harmonic < sum * 1e-17) break;
  }
  return -(std::log(0.5 * x) + kEulerGamma) * bessel_i_series(0.0, x) + sum;
}

double bessel_k1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;  // (x^2/4)^k / (k! (k+1)!)
  double psi1 = -kEulerGamma;      // psi(k+1)
  double psi2 = 1.0 - kEulerGamma; // psi(k+2)
  double sum = term * (psi1 + psi2);
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (k + 1.0));
    psi1 += 1.0 / k;
    psi2 += 1.0 / (k + 1.0);
    const double del = term * (psi1 + psi2);
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return 1.0 / x + std::log(0.5 * x) * bessel_i_series(1.0, x) - 0.25 * x * sum;
}

// Large-argument asymptotic expansion, adequate for x >= 10 at the modest
// orders used here.
double bessel_k_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 30; ++k) {
    const double num = mu - (2.0 * k + 1.0) * (2.0 * k + 1.0);
    const double next = term * num / (8.0 * x * (k + 1.0));
    if (std::abs(next) >= std::abs(term)) break;  // divergent tail reached
    term = next;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return std::sqrt(0.5 * kPi / x) * std::exp(-x) * sum;
}

}  // namespace

namespace detail {

double bessel_k(double lambda, double x) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(lambda))
    throw std::domain_error("bessel_k: need finite order and x > 0");
  const double nu = std::abs(lambda);  // K_{-nu} = K_nu

  // Half-odd-integer orders terminate: K_{1/2} = sqrt(pi/(2x)) e^{-x}, then
  // upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v is exact.
  const double twice = 2.0 * nu;
  if (std::abs(twice - std::round(twice)) < 1e-13 &&
      std::abs(nu - std::round(nu)) > 0.25) {
    double km = std::sqrt(0.5 * kPi / x) * std::exp(-x);  // K_{1/2}
    double k = km * (1.0 + 1.0 / x);                      // K_{3/2}
    if (nu < 1.0) return km;
    double v = 1.5;
    while (v < nu - 0.25) {
      const double kn = km + (2.0 * v / x) * k;
      km = k;
      k = kn;
      v += 1.0;
    }
    return k;
  }

  if (x >= 10.0) return bessel_k_asymptotic(nu, x);

  const double m = std::floor(nu);
  const double f = nu - m;
  double kf, kf1;  // K_f, K_{f+1}
  if (f < 1e-13) {
    kf = bessel_k0_series(x);
    kf1 = bessel_k1_series(x);
  } else {
    // K_f = (pi/2) (I_{-f} - I_f) / sin(pi f) for non-integer order.
    const double sf = std::sin(kPi * f);
    kf = 0.5 * kPi * (bessel_i_series(-f, x) - bessel_i_series(f, x)) / sf;
    kf1 = -0.5 * kPi *
          (bessel_i_series(-f - 1.0, x) - bessel_i_series(f + 1.0, x)) / sf;
  }
  double v = f;  // invariant: kf = K_v, kf1 = K_{v+1}
  for (int i = 1; i < static_cast<int>(m); ++i) {
    const double kn = kf + (2.0 * (v + 1.0) / x) * kf1;
    kf = kf1;
    kf1 = kn;
    v += 1.0;
  }
  return m == 0.0 ? kf : kf1;
}

}  // namespace detail

MixingSpec degenerate_mixing() { return {MixingKind::Degenerate, 0.0, 0.0}; }

MixingSpec gamma_mixing(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(rate))
    throw std::invalid_argument("gamma_mixing: need finite shape, rate > 0");
  return {MixingKind::Gamma, shape, rate};
}

MixingSpec inverse_gamma_mixing(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(rate))
    throw std::invalid_argument(
        "inverse_gamma_mixing: need finite shape, rate > 0");
  return {MixingKind::InverseGamma, shape, rate};
}

MixingSpec ig_from_dof(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("ig_from_dof: need finite nu > 0");
  return inverse_gamma_mixing(0.5 * nu, 0.5 * nu);
}

double quantile(const MixingSpec& spec, double u) {
  if (std::isnan(u) || u <= 0.0 || u >= 1.0)
    throw std::domain_error("mixing quantile: argument must lie in (0, 1)");
  switch (spec.kind) {
    case MixingKind::Degenerate:
      return 1.0;
    case MixingKind::Gamma:
      return reg_gamma_lower_inv(spec.shape, u) / spec.rate;
    case MixingKind::InverseGamma:
      // cdf is F(x) = Q(shape, rate/x), increasing in x because Q decreases
      // in its second argument; solving F(x) = u gives rate/x = Qinv(u).
      return spec.rate / reg_gamma_upper_inv(spec.shape, u);
  }
  throw std::logic_error("unreachable mixing kind");
}

double mixing_cdf(const MixingSpec& spec, double x) {
  if (!(x > 0.0))
    throw std::domain_error("mixing_cdf: need x > 0");
  switch (spec.kind) {
    case MixingKind::Degenerate:
      return x < 1.0 ? 0.0 : 1.0;
    case MixingKind::Gamma:
      return reg_gamma_lower(spec.shape, spec.rate * x);
    case MixingKind::InverseGamma:
      return reg_gamma_upper(spec.shape, spec.rate / x);
  }
  throw std::logic_error("unreachable mixing kind");
}

double gig_pdf(double lambda, double chi, double psi, double x) {
  if (!std::isfinite(lambda) || !(chi > 0.0) || !(psi > 0.0) ||
      !std::isfinite(chi) || !std::isfinite(psi))
    throw std::domain_error(
        "gig_pdf: interior case needs finite chi > 0, psi > 0");
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("gig_pdf: need finite x > 0");
  const double z = std::sqrt(psi * chi);
  const double k = detail::bessel_k(lambda, z);
  if (!(k > 0.0) || !std::isfinite(k))
    throw numeric_error("gig_pdf: Bessel normalization not computable");
  const double log_f = 0.5 * lambda * (std::log(psi) - std::log(chi)) -
                       std::log(2.0 * k) + (lambda - 1.0) * std::log(x) -
                       0.5 * (psi * x + chi / x);
  return std::exp(log_f);
}

}  // namespace skewrank

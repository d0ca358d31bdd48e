#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "skewrank/mixing.hpp"
#include "skewrank/specfun.hpp"

using namespace skewrank;

namespace {

// Small adaptive Simpson for the normalization oracle.
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b,
            double tol = 1e-9) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

TEST_CASE("degenerate mixing is the unit point mass") {
  const MixingSpec f = degenerate_mixing();
  for (double u : {1e-9, 0.2, 0.5, 0.97}) CHECK(quantile(f, u) == 1.0);
  CHECK_THROWS_AS(quantile(f, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(f, 1.0), std::domain_error);
}

TEST_CASE("gamma quantiles") {
  // Gamma(1, rate) is Exponential(rate).
  const MixingSpec e2 = gamma_mixing(1.0, 2.0);
  CHECK(std::abs(quantile(e2, 0.5) - std::log(2.0) / 2.0) < 1e-14);
  for (double u : {0.01, 0.3, 0.77, 0.999}) {
    CHECK(std::abs(quantile(e2, u) + std::log1p(-u) / 2.0) < 1e-12);
  }

  const MixingSpec g = gamma_mixing(2.0, 1.0);
  double prev = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double q = quantile(g, i / 1000.0);
    CHECK(q > prev);
    prev = q;
  }
  CHECK_THROWS_AS(gamma_mixing(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_mixing(2.0, -1.0), std::invalid_argument);
}

TEST_CASE("inverse gamma quantile orientation") {
  // IG(1,1) has cdf F(x) = exp(-1/x), so F^-1(e^-1) = 1 exactly.
  const MixingSpec ig11 = inverse_gamma_mixing(1.0, 1.0);
  CHECK(std::abs(quantile(ig11, std::exp(-1.0)) - 1.0) < 1e-12);
  for (double u : {0.05, 0.4, 0.9}) {
    CHECK(std::abs(mixing_cdf(ig11, quantile(ig11, u)) - u) < 1e-12);
    CHECK(std::abs(std::exp(-1.0 / quantile(ig11, u)) - u) < 1e-12);
  }

  // Round trip against the cdf Q(shape, rate/x) for a generic spec.
  const MixingSpec ig = inverse_gamma_mixing(2.0, 2.0);
  double prev = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double u = i / 1000.0;
    const double x = quantile(ig, u);
    CHECK(x > prev);
    prev = x;
    CHECK(std::abs(reg_gamma_upper(2.0, 2.0 / x) - u) < 1e-9);
  }
}

TEST_CASE("reciprocal law between gamma and inverse gamma") {
  // If W ~ Gamma(a, b) then 1/W ~ InverseGamma(a, b); on the quantile scale,
  // q_ig(u) * q_gamma(1 - u) = 1.
  const MixingSpec g = gamma_mixing(2.5, 1.7);
  const MixingSpec ig = inverse_gamma_mixing(2.5, 1.7);
  double worst = 0.0;
  for (int i = 1; i < 10000; ++i) {
    const double u = i / 10000.0;
    worst = std::max(worst,
                     std::abs(quantile(ig, u) * quantile(g, 1.0 - u) - 1.0));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("ig_from_dof") {
  const MixingSpec m4 = ig_from_dof(4.0);
  CHECK(m4.kind == MixingKind::InverseGamma);
  CHECK(m4.shape == 2.0);
  CHECK(m4.rate == 2.0);
  const MixingSpec m10 = ig_from_dof(10.0);
  CHECK(m10.shape == 5.0);
  CHECK(m10.rate == 5.0);
  CHECK_THROWS_AS(ig_from_dof(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ig_from_dof(-3.0), std::invalid_argument);
}

TEST_CASE("gig density, half-integer order closed form") {
  // K_{1/2}(z) = sqrt(pi/(2z)) e^-z collapses the lambda = -1/2, chi = psi = 1
  // density at x = 1 to 1/sqrt(2 pi).
  const double norm_const =
      0.5 / detail::bessel_k(-0.5, 1.0);  // (psi/chi)^(lambda/2) = 1
  const double by_hand = norm_const * std::pow(1.0, -1.5) * std::exp(-1.0);
  CHECK(std::abs(gig_pdf(-0.5, 1.0, 1.0, 1.0) - by_hand) < 1e-14);
  CHECK(std::abs(gig_pdf(-0.5, 1.0, 1.0, 1.0) -
                 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-13);
}

TEST_CASE("gig density normalizes") {
  for (auto [lam, chi, psi] :
       {std::tuple{1.3, 0.7, 1.1}, {-0.5, 1.0, 1.0}, {0.0, 2.0, 0.5}}) {
    const double mass = quad(
        [=](double x) { return x < 1e-12 ? 0.0 : gig_pdf(lam, chi, psi, x); },
        1e-12, 60.0, 1e-9);
    CHECK(std::abs(mass - 1.0) < 1e-6);
  }
}

TEST_CASE("gig domain errors") {
  CHECK_THROWS_AS(gig_pdf(1.0, 1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(gig_pdf(1.0, 1.0, 1.0, -2.0), std::domain_error);
  // Boundary parameter combinations belong to the gamma / inverse-gamma
  // limits, not to gig_pdf.
  CHECK_THROWS_AS(gig_pdf(1.0, 0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gig_pdf(-1.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("bessel k self-consistency") {
  // Half-integer closed forms.
  for (double x : {0.3, 1.0, 4.0, 12.0}) {
    const double k_half = std::sqrt(std::numbers::pi / (2.0 * x)) *
                          std::exp(-x);
    CHECK(std::abs(detail::bessel_k(0.5, x) - k_half) <= 1e-13 * k_half);
    const double k_3half = k_half * (1.0 + 1.0 / x);
    CHECK(std::abs(detail::bessel_k(1.5, x) - k_3half) <= 1e-12 * k_3half);
  }
  // Symmetry in the order and the three-term recurrence
  // K_{l+1}(x) = K_{l-1}(x) + (2 l / x) K_l(x). The reflection formula
  // behind the non-integer series loses about e^{2x} eps to cancellation,
  // so mid-range x only supports ~1e-9 relative agreement.
  for (double lam : {0.3, 0.8, 2.2})
    for (double x : {0.5, 2.0, 7.0, 20.0}) {
      CHECK(detail::bessel_k(-lam, x) == detail::bessel_k(lam, x));
      const double lhs = detail::bessel_k(lam + 1.0, x);
      const double rhs = detail::bessel_k(lam - 1.0, x) +
                         2.0 * lam / x * detail::bessel_k(lam, x);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
    }
  // Leading asymptotic behavior for large argument.
  const double x = 40.0;
  const double lead = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
  CHECK(std::abs(detail::bessel_k(0.0, x) - lead) <= 0.01 * lead);
}

#include "skewrank/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace skewrank {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;  // 1/sqrt(2*pi)

// 64-node Gauss-Legendre rule on [0, 1], nodes by Newton iteration on the
// Legendre recurrence (Numerical Recipes gauleg). Built once, immutable.
struct Gauss64 {
  std::array<double, 64> x{};
  std::array<double, 64> w{};
  Gauss64() {
    constexpr int n = 64;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      // map [-1, 1] -> [0, 1]
      x[i] = 0.5 * (1.0 - z);
      x[n - 1 - i] = 0.5 * (1.0 + z);
      w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const Gauss64& gauss64() {
  static const Gauss64 g;
  return g;
}

// int_0^a exp(-h^2(1+t^2)/2) / (1+t^2) dt / (2*pi) for 0 < a <= 1, h > 0.
double owen_core(double h, double a) {
  const Gauss64& g = gauss64();
  const double h2 = 0.5 * h * h;
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double t = a * g.x[i];
    const double u = 1.0 + t * t;
    sum += g.w[i] * std::exp(-h2 * u) / u;
  }
  return a * sum / kTwoPi;
}

}  // namespace

double norm_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double norm_quantile(double u) {
  if (std::isnan(u) || u <= 0.0 || u >= 1.0)
    throw std::domain_error("norm_quantile: argument must lie in (0, 1)");

  // Wichura's algorithm AS 241 (PPND16), then one guarded Newton step.
  const double q = u - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
  } else {
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) *
                    r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) *
                    r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
            2.05319162663775882187e0) *
               r +
           1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) *
                    r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                    r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
    }
    if (q < 0.0) x = -x;
  }

  // Newton refinement; residual formed on the short tail to avoid
  // cancellation near u ~ 1.
  const double pdf = norm_pdf(x);
  if (pdf > 0.0) {
    const double err =
        x >= 0.0 ? (1.0 - u) - norm_cdf(-x) : norm_cdf(x) - u;
    x -= err / pdf;
  }
  return x;
}

double owen_t(double h, double a) {
  if (std::isnan(h) || std::isnan(a))
    return std::numeric_limits<double>::quiet_NaN();
  if (a == 0.0) return 0.0;

  const double sign = a < 0.0 ? -1.0 : 1.0;
  const double aa = std::abs(a);
  const double hh = std::abs(h);  // T(-h, a) = T(h, a)
  if (std::isinf(hh)) return 0.0;
  if (std::isinf(aa)) return sign * 0.5 * norm_cdf(-hh);
  if (hh == 0.0) return sign * std::atan(aa) / kTwoPi;

  double t;
  if (aa <= 1.0) {
    t = owen_core(hh, aa);
  } else {
    // T(h, a) = [Phi(h) + Phi(ah)]/2 - Phi(h)Phi(ah) - T(ah, 1/a),
    // reducing the integration range to (0, 1].
    const double ph = norm_cdf(hh);
    const double pah = norm_cdf(aa * hh);
    t = 0.5 * (ph + pah) - ph * pah - owen_core(aa * hh, 1.0 / aa);
  }
  return sign * std::clamp(t, 0.0, 0.25);
}

double bvn_cdf(double x1, double x2, double rho) {
  if (std::isnan(x1) || std::isnan(x2) || std::isnan(rho))
    return std::numeric_limits<double>::quiet_NaN();
  if (!(std::abs(rho) <= 1.0))
    throw std::domain_error("bvn_cdf: correlation must lie in [-1, 1]");

  const double inf = std::numeric_limits<double>::infinity();
  if (x1 == -inf || x2 == -inf) return 0.0;
  if (x1 == inf) return norm_cdf(x2);
  if (x2 == inf) return norm_cdf(x1);

  // Comonotone / countermonotone boundaries.
  if (rho == 1.0) return norm_cdf(std::min(x1, x2));
  if (rho == -1.0) return std::max(norm_cdf(x1) + norm_cdf(x2) - 1.0, 0.0);
  if (x1 == 0.0 && x2 == 0.0) return 0.25 + std::asin(rho) / kTwoPi;

  // Owen's decomposition into two T terms. An exactly-zero argument is the
  // limit x -> 0+, where (y - rho*x)/(x*s) -> sign(y)*inf.
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  const auto ratio = [&](double x, double y) {
    if (x == 0.0) return y > 0.0 ? inf : -inf;
    return (y - rho * x) / (x * s);
  };
  const double t1 = owen_t(x1, ratio(x1, x2));
  const double t2 = owen_t(x2, ratio(x2, x1));
  const bool opposite =
      (x1 * x2 < 0.0) || (x1 * x2 == 0.0 && (x1 < 0.0 || x2 < 0.0));
  const double p =
      0.5 * (norm_cdf(x1) + norm_cdf(x2)) - (opposite ? 0.5 : 0.0) - t1 - t2;
  return std::clamp(p, 0.0, 1.0);
}

double skew_norm_cdf(double x, double alpha) {
  if (std::isnan(x) || std::isnan(alpha))
    return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(norm_cdf(x) - 2.0 * owen_t(x, alpha), 0.0, 1.0);
}

namespace {

// Series for P(a, x), valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) by modified Lentz, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Solves P(a, x) = p with q = 1 - p supplied exactly by the caller; the
// residual is always formed on the smaller tail.
double inv_reg_gamma_pq(double a, double p, double q) {
  // Initial guess: Wilson-Hilferty for a > 1, else the small-a split of
  // Numerical Recipes' invgammp.
  double x;
  if (a > 1.0) {
    const double z = q < 0.5 ? -norm_quantile(q) : norm_quantile(p);
    const double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
    x = a * t * t * t;
    if (!(x > 0.0)) x = 1e-3 * a;
  } else {
    const double t = 1.0 - a * (0.253 + 0.12 * a);
    x = p < t ? std::pow(p / t, 1.0 / a)
              : 1.0 - std::log1p(-(p - t) / (1.0 - t));
  }

  const double lg = std::lgamma(a);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const bool lower_tail = p <= 0.5;
    const double err =
        lower_tail ? reg_gamma_lower(a, x) - p : q - reg_gamma_upper(a, x);
    if (err > 0.0)
      hi = x;
    else
      lo = x;
    const double pdf = std::exp((a - 1.0) * std::log(x) - x - lg);
    double xn;
    if (pdf > 0.0 && std::isfinite(pdf)) {
      xn = x - err / pdf;
    } else {
      xn = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(xn > lo && xn < hi))
      xn = std::isinf(hi) ? 2.0 * x + 1.0 : 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-14 * (x + 1e-300)) return xn;
    x = xn;
  }
  return x;
}

}  // namespace

double reg_gamma_lower(double a, double x) {
  if (!(a > 0.0) || std::isnan(x) || x < 0.0)
    throw std::domain_error("reg_gamma_lower: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_q_cf(a, x), 0.0, 1.0);
}

double reg_gamma_upper(double a, double x) {
  if (!(a > 0.0) || std::isnan(x) || x < 0.0)
    throw std::domain_error("reg_gamma_upper: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_cf(a, x), 0.0, 1.0);
}

double reg_gamma_upper_inv(double a, double u) {
  if (!(a > 0.0)) throw std::domain_error("reg_gamma_upper_inv: need a > 0");
  if (std::isnan(u) || u <= 0.0 || u >= 1.0)
    throw std::domain_error("reg_gamma_upper_inv: argument must lie in (0, 1)");
  // Q(a, x) = u  <=>  P(a, x) = 1 - u; whichever of u, 1 - u is below 1/2 is
  // exact in double precision.
  return inv_reg_gamma_pq(a, 1.0 - u, u);
}

double reg_gamma_lower_inv(double a, double u) {
  if (!(a > 0.0)) throw std::domain_error("reg_gamma_lower_inv: need a > 0");
  if (std::isnan(u) || u <= 0.0 || u >= 1.0)
    throw std::domain_error("reg_gamma_lower_inv: argument must lie in (0, 1)");
  return inv_reg_gamma_pq(a, u, 1.0 - u);
}

}  // namespace skewrank

#include "skewrank/rankcorr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>

#include "skewrank/orthant.hpp"
#include "skewrank/specfun.hpp"

namespace skewrank {

namespace {

constexpr double kPi = std::numbers::pi;

void check_params(double rho, const Eigen::Vector2d& skew) {
  if (!(std::abs(rho) <= 1.0))
    throw std::domain_error("rank correlation: |rho| must be <= 1");
  if (!skew.allFinite())
    throw std::domain_error("rank correlation: skew must be finite");
}

// The four-element orbit every integrand is averaged over, in fixed order.
// Margin exchange and joint reflection both preserve the rank measures, so
// each element has the same expectation as the first.
std::array<Eigen::Vector2d, 4> skew_orbit(const Eigen::Vector2d& s) {
  return {s, Eigen::Vector2d(s(1), s(0)), Eigen::Vector2d(-s(0), -s(1)),
          Eigen::Vector2d(-s(1), -s(0))};
}

// Inverse cdf of |N(0,1)|. Formed on the lower tail: (1 + u)/2 can round
// to 1 for u near 1 - 2^-53, (1 - u)/2 cannot round to 0.
double half_normal_quantile(double u) {
  return -norm_quantile(0.5 * (1.0 - u));
}

double closed_kendall(double rho) { return 2.0 * std::asin(rho) / kPi; }
double closed_spearman(double rho) { return 6.0 * std::asin(0.5 * rho) / kPi; }

// A resolved computation: either a closed-form value (dim == 0) or an
// integrand over the unit cube of dimension dim.
struct Path {
  Method method = Method::ClosedForm;
  int dim = 0;
  double closed_value = 0.0;
  std::function<double(std::span<const double>)> f;
};

Path closed_path(double value) {
  Path p;
  p.method = Method::ClosedForm;
  p.closed_value = value;
  return p;
}

// Spearman integrand shared by MN beta = 0 and MSN alpha = 0 with a
// nondegenerate mixing law: the skew terms vanish and only the arcsine of
// the randomly shrunk correlation remains.
Path spearman_arcsine_path(double rho, const MixingSpec& mixing) {
  Path p;
  p.method = Method::ThmExpectation;
  p.dim = 3;
  p.f = [rho, mixing](std::span<const double> u) {
    const double w1 = quantile(mixing, u[0]);
    const double w2 = quantile(mixing, u[1]);
    const double w3 = quantile(mixing, u[2]);
    const double v3 = w3 / std::sqrt((w1 + w3) * (w2 + w3));
    return (6.0 / kPi) * std::asin(std::clamp(rho * v3, -1.0, 1.0));
  };
  return p;
}

Path make_mn_path(double rho, const Eigen::Vector2d& beta,
                  const MixingSpec& mixing, Measure measure,
                  std::optional<Method> force) {
  check_params(rho, beta);
  if (force == Method::CorBivariate)
    throw std::invalid_argument(
        "rank correlation: CorBivariate applies to the MSN family only");

  const bool zero = beta.isZero(0.0);
  const bool degen = mixing.kind == MixingKind::Degenerate;
  const bool closed_ok =
      measure == Measure::Kendall ? (zero || degen) : degen;
  if (force == Method::ClosedForm && !closed_ok)
    throw std::invalid_argument(
        "rank correlation: no closed form for this MN configuration");

  if (closed_ok && force != Method::ThmExpectation)
    return closed_path(measure == Measure::Kendall ? closed_kendall(rho)
                                                   : closed_spearman(rho));

  if (measure == Measure::Kendall) {
    Path p;
    p.method = Method::ThmExpectation;
    p.dim = 2;
    const auto orb = skew_orbit(beta);
    p.f = [orb, rho, mixing](std::span<const double> u) {
      const double w1 = quantile(mixing, u[0]);
      const double w2 = quantile(mixing, u[1]);
      const double g = (w2 - w1) / std::sqrt(w1 + w2);
      double acc = 0.0;
      for (const auto& s : orb) acc += bvn_cdf(s(0) * g, s(1) * g, rho);
      return acc - 1.0;
    };
    return p;
  }

  if (zero) return spearman_arcsine_path(rho, mixing);

  Path p;
  p.method = Method::ThmExpectation;
  p.dim = 3;
  const auto orb = skew_orbit(beta);
  p.f = [orb, rho, mixing](std::span<const double> u) {
    const double w1 = quantile(mixing, u[0]);
    const double w2 = quantile(mixing, u[1]);
    const double w3 = quantile(mixing, u[2]);
    const double h1 = (w1 - w3) / std::sqrt(w1 + w3);
    const double h2 = (w2 - w3) / std::sqrt(w2 + w3);
    const double v3 = w3 / std::sqrt((w1 + w3) * (w2 + w3));
    const double r = std::clamp(rho * v3, -1.0, 1.0);
    double acc = 0.0;
    for (const auto& s : orb) acc += bvn_cdf(s(0) * h1, s(1) * h2, r);
    return 3.0 * acc - 3.0;
  };
  return p;
}

std::array<DerivedSkew, 4> orbit_derived(double rho,
                                         const Eigen::Vector2d& alpha) {
  const auto orb = skew_orbit(alpha);
  return {derived_skew(rho, orb[0]), derived_skew(rho, orb[1]),
          derived_skew(rho, orb[2]), derived_skew(rho, orb[3])};
}

// Fill the 4x4 Kendall orthant correlation for one orbit element into m
// (slots outside the leading block stay identity).
void fill_tau_corr(Eigen::Matrix<double, 5, 5>& m, double rho,
                   const Eigen::Vector2d& d, double v1, double v2) {
  m(0, 1) = m(1, 0) = rho;
  m(0, 2) = m(2, 0) = d(0) * v1;
  m(0, 3) = m(3, 0) = d(0) * v2;
  m(1, 2) = m(2, 1) = d(1) * v1;
  m(1, 3) = m(3, 1) = d(1) * v2;
}

// Fill the 5x5 Spearman orthant correlation; v packs (v1, v2, v1m, v2m, v3).
void fill_s_corr(Eigen::Matrix<double, 5, 5>& m, double rho,
                 const Eigen::Vector2d& d, const std::array<double, 5>& v) {
  m(0, 1) = m(1, 0) = rho * v[4];
  m(0, 2) = m(2, 0) = d(0) * v[0];
  m(0, 4) = m(4, 0) = d(0) * v[2];
  m(1, 3) = m(3, 1) = d(1) * v[1];
  m(1, 4) = m(4, 1) = d(1) * v[3];
}

// Skew-normal copula: degenerate mixing collapses the mixing coordinates
// to constants, leaving fixed orthant plans (ThmExpectation) or fixed
// half-normal reductions (CorBivariate).
Path make_skew_normal_path(double rho, const Eigen::Vector2d& alpha,
                           Measure measure, Method method) {
  const auto ds = orbit_derived(rho, alpha);
  const double c = std::sqrt(0.5);

  if (method == Method::ThmExpectation) {
    std::array<GenzPlan, 4> plans;
    if (measure == Measure::Kendall) {
      for (int e = 0; e < 4; ++e) {
        Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Identity();
        fill_tau_corr(m, rho, ds[e].delta, c, -c);
        plans[e] = detail::genz_plan_unchecked(m, 4);
      }
      Path p;
      p.method = method;
      p.dim = 3;
      p.f = [plans](std::span<const double> u) {
        double acc = 0.0;
        for (const auto& plan : plans) acc += genz_eval(plan, u);
        return 4.0 * acc - 1.0;
      };
      return p;
    }
    for (int e = 0; e < 4; ++e) {
      Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Identity();
      fill_s_corr(m, rho, ds[e].delta, {c, c, -c, -c, 0.5});
      plans[e] = detail::genz_plan_unchecked(m, 5);
    }
    Path p;
    p.method = method;
    p.dim = 4;
    p.f = [plans](std::span<const double> u) {
      double acc = 0.0;
      for (const auto& plan : plans) acc += genz_eval(plan, u);
      return 24.0 * acc - 3.0;
    };
    return p;
  }

  if (measure == Measure::Kendall) {
    Path p;
    p.method = Method::CorBivariate;
    p.dim = 2;
    p.f = [ds, c](std::span<const double> u) {
      const double z =
          c * half_normal_quantile(u[0]) - c * half_normal_quantile(u[1]);
      double acc = 0.0;
      for (const auto& d : ds)
        acc += bvn_cdf(d.alpha_dagger(0) * z, d.alpha_dagger(1) * z,
                       d.rho_dagger);
      return acc - 1.0;
    };
    return p;
  }
  Path p;
  p.method = Method::CorBivariate;
  p.dim = 3;
  p.f = [ds, c](std::span<const double> u) {
    const double y1 = half_normal_quantile(u[0]);
    const double y2 = half_normal_quantile(u[1]);
    const double y3 = half_normal_quantile(u[2]);
    const double z1 = c * y1 - c * y3;
    const double z2 = c * y2 - c * y3;
    double acc = 0.0;
    for (const auto& d : ds)
      acc += bvn_cdf(d.alpha_dagger(0) * z1, d.alpha_dagger(1) * z2,
                     0.5 * d.rho_dagger);
    return 3.0 * acc - 3.0;
  };
  return p;
}

Path make_msn_path(double rho, const Eigen::Vector2d& alpha,
                   const MixingSpec& mixing, Measure measure,
                   std::optional<Method> force) {
  check_params(rho, alpha);

  // Comonotone and countermonotone boundaries hold for every slant and
  // mixing law; pinning them avoids integrating a degenerate copula.
  if (rho == 1.0) return closed_path(1.0);
  if (rho == -1.0) return closed_path(-1.0);

  const bool zero = alpha.isZero(0.0);
  const bool degen = mixing.kind == MixingKind::Degenerate;
  const bool closed_ok =
      measure == Measure::Kendall ? zero : (zero && degen);
  if (force == Method::ClosedForm && !closed_ok)
    throw std::invalid_argument(
        "rank correlation: no closed form for this MSN configuration");

  if (closed_ok && !force)
    return closed_path(measure == Measure::Kendall ? closed_kendall(rho)
                                                   : closed_spearman(rho));
  if (closed_ok && force == Method::ClosedForm)
    return closed_path(measure == Measure::Kendall ? closed_kendall(rho)
                                                   : closed_spearman(rho));

  if (zero && measure == Measure::Spearman && !degen &&
      force != Method::CorBivariate && force != Method::ThmExpectation)
    return spearman_arcsine_path(rho, mixing);

  if (degen)
    return make_skew_normal_path(rho, alpha, measure,
                                 force.value_or(Method::ThmExpectation));

  const Method method = force.value_or(Method::CorBivariate);
  const auto ds = orbit_derived(rho, alpha);

  if (measure == Measure::Kendall) {
    Path p;
    p.method = method;
    if (method == Method::CorBivariate) {
      p.dim = 4;
      p.f = [ds, mixing](std::span<const double> u) {
        const double w1 = quantile(mixing, u[0]);
        const double w2 = quantile(mixing, u[1]);
        const double sw = std::sqrt(w1 + w2);
        const double v1 = std::sqrt(w2) / sw;
        const double v2 = -std::sqrt(w1) / sw;
        const double z = v1 * half_normal_quantile(u[2]) +
                         v2 * half_normal_quantile(u[3]);
        double acc = 0.0;
        for (const auto& d : ds)
          acc += bvn_cdf(d.alpha_dagger(0) * z, d.alpha_dagger(1) * z,
                         d.rho_dagger);
        return acc - 1.0;
      };
    } else {
      p.dim = 5;
      p.f = [ds, rho, mixing](std::span<const double> u) {
        const double w1 = quantile(mixing, u[0]);
        const double w2 = quantile(mixing, u[1]);
        const double sw = std::sqrt(w1 + w2);
        const double v1 = std::sqrt(w2) / sw;
        const double v2 = -std::sqrt(w1) / sw;
        double acc = 0.0;
        for (const auto& d : ds) {
          Eigen::Matrix<double, 5, 5> m =
              Eigen::Matrix<double, 5, 5>::Identity();
          fill_tau_corr(m, rho, d.delta, v1, v2);
          acc += genz_eval(detail::genz_plan_unchecked(m, 4), u.subspan(2, 3));
        }
        return 4.0 * acc - 1.0;
      };
    }
    return p;
  }

  Path p;
  p.method = method;
  if (method == Method::CorBivariate) {
    p.dim = 6;
    p.f = [ds, mixing](std::span<const double> u) {
      const double w1 = quantile(mixing, u[0]);
      const double w2 = quantile(mixing, u[1]);
      const double w3 = quantile(mixing, u[2]);
      const double s13 = std::sqrt(w1 + w3);
      const double s23 = std::sqrt(w2 + w3);
      const double r3 = std::sqrt(w3);
      const double v1 = std::sqrt(w1) / s13;
      const double v2 = std::sqrt(w2) / s23;
      const double v1m = -r3 / s13;
      const double v2m = -r3 / s23;
      const double v3 = v1m * v2m;
      const double z1 = v1 * half_normal_quantile(u[3]) +
                        v1m * half_normal_quantile(u[5]);
      const double z2 = v2 * half_normal_quantile(u[4]) +
                        v2m * half_normal_quantile(u[5]);
      double acc = 0.0;
      for (const auto& d : ds)
        acc += bvn_cdf(d.alpha_dagger(0) * z1, d.alpha_dagger(1) * z2,
                       d.rho_dagger * v3);
      return 3.0 * acc - 3.0;
    };
  } else {
    p.dim = 7;
    p.f = [ds, rho, mixing](std::span<const double> u) {
      const double w1 = quantile(mixing, u[0]);
      const double w2 = quantile(mixing, u[1]);
      const double w3 = quantile(mixing, u[2]);
      const double s13 = std::sqrt(w1 + w3);
      const double s23 = std::sqrt(w2 + w3);
      const double r3 = std::sqrt(w3);
      const std::array<double, 5> v = {std::sqrt(w1) / s13,
                                       std::sqrt(w2) / s23, -r3 / s13,
                                       -r3 / s23, (r3 / s13) * (r3 / s23)};
      double acc = 0.0;
      for (const auto& d : ds) {
        Eigen::Matrix<double, 5, 5> m =
            Eigen::Matrix<double, 5, 5>::Identity();
        fill_s_corr(m, rho, d.delta, v);
        acc += genz_eval(detail::genz_plan_unchecked(m, 5), u.subspan(3, 4));
      }
      return 24.0 * acc - 3.0;
    };
  }
  return p;
}

Path make_path(const CopulaSpec& spec, Measure measure,
               std::optional<Method> force) {
  return spec.family == Family::MN
             ? make_mn_path(spec.rho, spec.skew, spec.mixing, measure, force)
             : make_msn_path(spec.rho, spec.skew, spec.mixing, measure, force);
}

RankResult run_path(const Path& p, Measure measure, const QmcConfig& cfg) {
  validate(cfg);
  RankResult r;
  r.measure = measure;
  r.method = p.method;
  if (p.dim == 0) {
    r.estimate.value = p.closed_value;
    r.estimate.std_error = 0.0;
    r.estimate.points_used = 1;
  } else {
    r.estimate = integrate(p.f, p.dim, cfg);
  }
  return r;
}

}  // namespace

double RankResult::value() const noexcept {
  return std::clamp(estimate.value, -1.0, 1.0);
}

Eigen::Vector2d delta_from_alpha(double rho, const Eigen::Vector2d& alpha) {
  check_params(rho, alpha);
  // Grouped so that exchanging or jointly negating the slants reproduces
  // the same intermediate values bit for bit.
  const double den =
      std::sqrt(1.0 + (alpha(0) * alpha(0) + alpha(1) * alpha(1)) +
                2.0 * rho * (alpha(0) * alpha(1)));
  return {(alpha(0) + rho * alpha(1)) / den, (alpha(1) + rho * alpha(0)) / den};
}

Eigen::Vector2d alpha_from_delta(double rho, const Eigen::Vector2d& delta) {
  if (!(std::abs(rho) < 1.0))
    throw std::domain_error("alpha_from_delta: need |rho| < 1");
  if (!delta.allFinite())
    throw std::domain_error("alpha_from_delta: delta must be finite");
  const double q = 1.0 - rho * rho -
                   (delta(0) * delta(0) + delta(1) * delta(1)) +
                   2.0 * rho * (delta(0) * delta(1));
  if (!(q > 0.0))
    throw std::domain_error(
        "alpha_from_delta: delta outside the admissible region for this rho");
  const double den = std::sqrt((1.0 - rho) * (1.0 + rho)) * std::sqrt(q);
  return {(delta(0) - rho * delta(1)) / den,
          (delta(1) - rho * delta(0)) / den};
}

DerivedSkew derived_skew(double rho, const Eigen::Vector2d& alpha) {
  DerivedSkew out;
  out.delta = delta_from_alpha(rho, alpha);
  for (int i = 0; i < 2; ++i)
    out.alpha_dagger(i) =
        out.delta(i) /
        std::sqrt((1.0 - out.delta(i)) * (1.0 + out.delta(i)));
  if (rho == 1.0) {
    out.rho_dagger = 1.0;
  } else if (rho == -1.0) {
    out.rho_dagger = -1.0;
  } else {
    const double num = rho - out.delta(0) * out.delta(1);
    const double den =
        std::sqrt((1.0 - out.delta(0)) * (1.0 + out.delta(0))) *
        std::sqrt((1.0 - out.delta(1)) * (1.0 + out.delta(1)));
    if (den > 0.0)
      out.rho_dagger = std::clamp(num / den, -1.0, 1.0);
    else
      out.rho_dagger = num > 0.0 ? 1.0 : (num < 0.0 ? -1.0 : 0.0);
  }
  return out;
}

EquiSkewDerived equi_skew_derived(double rho, double a) {
  check_params(rho, {a, a});
  EquiSkewDerived out;
  const double t = a * (1.0 + rho);
  out.delta_bar = t / std::sqrt(1.0 + 2.0 * a * t);
  const double den = 1.0 + a * a * (1.0 - rho * rho);
  out.alpha_dagger_bar = t / std::sqrt(den);
  out.rho_dagger = std::clamp((1.0 + rho) / den - 1.0, -1.0, 1.0);
  return out;
}

SingleSkewDerived single_skew_derived(double rho, double a) {
  check_params(rho, {a, 0.0});
  SingleSkewDerived out;
  out.delta_circ = a / std::sqrt(1.0 + a * a);
  out.rho_dagger =
      std::clamp(rho / std::sqrt(1.0 + a * a * (1.0 - rho * rho)), -1.0, 1.0);
  out.alpha2_dagger = a * out.rho_dagger;
  return out;
}

RankResult kendall_mn(double rho, const Eigen::Vector2d& beta,
                      const MixingSpec& mixing, const QmcConfig& cfg,
                      std::optional<Method> force) {
  return run_path(make_mn_path(rho, beta, mixing, Measure::Kendall, force),
                  Measure::Kendall, cfg);
}

RankResult spearman_mn(double rho, const Eigen::Vector2d& beta,
                       const MixingSpec& mixing, const QmcConfig& cfg,
                       std::optional<Method> force) {
  return run_path(make_mn_path(rho, beta, mixing, Measure::Spearman, force),
                  Measure::Spearman, cfg);
}

RankResult kendall_msn(double rho, const Eigen::Vector2d& alpha,
                       const MixingSpec& mixing, const QmcConfig& cfg,
                       std::optional<Method> force) {
  return run_path(make_msn_path(rho, alpha, mixing, Measure::Kendall, force),
                  Measure::Kendall, cfg);
}

RankResult spearman_msn(double rho, const Eigen::Vector2d& alpha,
                        const MixingSpec& mixing, const QmcConfig& cfg,
                        std::optional<Method> force) {
  return run_path(make_msn_path(rho, alpha, mixing, Measure::Spearman, force),
                  Measure::Spearman, cfg);
}

RankResult skew_normal_rankcorr(double rho, const Eigen::Vector2d& alpha,
                                Measure measure, const QmcConfig& cfg,
                                std::optional<Method> force) {
  return run_path(
      make_msn_path(rho, alpha, degenerate_mixing(), measure, force), measure,
      cfg);
}

RankResult rank_correlation(const CopulaSpec& spec, Measure measure,
                            const QmcConfig& cfg,
                            std::optional<Method> force) {
  return run_path(make_path(spec, measure, force), measure, cfg);
}

PairedDifference paired_difference(const CopulaSpec& a, const CopulaSpec& b,
                                   Measure measure, const QmcConfig& cfg,
                                   std::optional<Method> force) {
  validate(cfg);
  const Path pa = make_path(a, measure, force);
  const Path pb = make_path(b, measure, force);

  PairedDifference out;
  out.method_a = pa.method;
  out.method_b = pb.method;

  if (pa.dim == 0 && pb.dim == 0) {
    out.difference = pa.closed_value - pb.closed_value;
    out.std_error = 0.0;
    out.points_used = 1;
    return out;
  }
  if (pa.dim == 0 || pb.dim == 0) {
    const Path& q = pa.dim == 0 ? pb : pa;
    const double cv = pa.dim == 0 ? pa.closed_value : pb.closed_value;
    const QmcEstimate est = integrate(q.f, q.dim, cfg);
    out.difference = pa.dim == 0 ? cv - est.value : est.value - cv;
    out.std_error = est.std_error;
    out.points_used = est.points_used;
    return out;
  }
  if (pa.dim != pb.dim)
    throw std::invalid_argument(
        "paired_difference: the two specifications resolve to different "
        "integration layouts; evaluate them separately");
  const QmcEstimate est = integrate(
      [&pa, &pb](std::span<const double> u) { return pa.f(u) - pb.f(u); },
      pa.dim, cfg);
  out.difference = est.value;
  out.std_error = est.std_error;
  out.points_used = est.points_used;
  return out;
}

}  // namespace skewrank

#include "skewrank/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "skewrank/errors.hpp"

namespace skewrank {

namespace {

constexpr int kMaxIter = 200;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("inversion: tol must be finite and > 0");
}

// Forward evaluation at a given rho, refusing tolerances the integration
// noise cannot support.
double eval_checked(const CopulaSpec& spec, Measure measure, double r,
                    const QmcConfig& cfg, double tol) {
  CopulaSpec s = spec;
  s.rho = r;
  const RankResult res = rank_correlation(s, measure, cfg);
  if (res.estimate.std_error * 10.0 > tol)
    throw std::invalid_argument(
        "inversion: tol is tighter than 10x the forward std error; "
        "increase the QMC budget or loosen tol");
  return res.estimate.value;
}

}  // namespace

std::pair<double, double> attainable_range(const CopulaSpec& spec,
                                           Measure measure,
                                           const QmcConfig& cfg) {
  if (spec.family == Family::MSN) return {-1.0, 1.0};
  CopulaSpec s = spec;
  s.rho = -1.0;
  const double lo = rank_correlation(s, measure, cfg).value();
  s.rho = 1.0;
  const double hi = rank_correlation(s, measure, cfg).value();
  return std::minmax(lo, hi);
}

EstimateResult invert_rho(const CopulaSpec& spec, Measure measure,
                          double target, const QmcConfig& cfg, double tol) {
  check_tol(tol);
  if (!std::isfinite(target))
    throw std::invalid_argument("invert_rho: target must be finite");
  validate(cfg);

  double a = -1.0, b = 1.0;
  double fa = eval_checked(spec, measure, a, cfg, tol) - target;
  double fb = eval_checked(spec, measure, b, cfg, tol) - target;
  const std::pair<double, double> attainable =
      std::minmax(std::clamp(fa + target, -1.0, 1.0),
                  std::clamp(fb + target, -1.0, 1.0));

  EstimateResult out;
  out.attainable = attainable;
  if (std::abs(fa) <= tol) {
    out.rho_hat = a;
    out.residual = fa;
    out.bracket = {a, a};
    return out;
  }
  if (std::abs(fb) <= tol) {
    out.rho_hat = b;
    out.residual = fb;
    out.bracket = {b, b};
    return out;
  }
  if ((fa > 0.0) == (fb > 0.0))
    throw out_of_attainable_range(target, attainable);

  // Brent's method: inverse quadratic / secant steps guarded by bisection.
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= kMaxIter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 1e-13;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= tol) {
      out.rho_hat = b;
      out.residual = fb;
      out.iterations = it;
      out.bracket = std::minmax(b, c);
      return out;
    }
    if (std::abs(xm) <= tol1 || fb == 0.0)
      throw no_convergence(
          "invert_rho: bracket collapsed before reaching the residual "
          "tolerance",
          it);

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = eval_checked(spec, measure, b, cfg, tol) - target;
  }
  throw no_convergence("invert_rho: iteration cap reached", kMaxIter);
}

namespace {

struct Probe {
  double a = 0.0;
  bool valid = false;
  EstimateResult inner;              // Kendall inversion at this slant
  double g = 0.0;                    // Spearman residual
  std::pair<double, double> range;   // Kendall range when invalid
};

}  // namespace

EquiSkewEstimate invert_equi_skew(Family family, const MixingSpec& mixing,
                                  double tau_target, double rhos_target,
                                  const QmcConfig& cfg, double tol,
                                  double a_max) {
  check_tol(tol);
  if (!std::isfinite(tau_target) || !std::isfinite(rhos_target))
    throw std::invalid_argument("invert_equi_skew: targets must be finite");
  if (!(a_max > 0.0) || !(a_max <= 64.0))
    throw std::invalid_argument("invert_equi_skew: need 0 < a_max <= 64");
  validate(cfg);

  int inner_count = 0;
  auto probe_at = [&](double a) {
    Probe p;
    p.a = a;
    ++inner_count;
    CopulaSpec spec;
    spec.family = family;
    spec.mixing = mixing;
    spec.skew = Eigen::Vector2d(a, a);
    try {
      p.inner = invert_rho(spec, Measure::Kendall, tau_target, cfg, tol);
      spec.rho = p.inner.rho_hat;
      p.g = rank_correlation(spec, Measure::Spearman, cfg).estimate.value -
            rhos_target;
      p.valid = true;
    } catch (const out_of_attainable_range& ex) {
      p.range = ex.range();
    }
    return p;
  };

  std::vector<double> grid;
  for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0})
    if (a < a_max) grid.push_back(a);
  grid.push_back(a_max);

  std::vector<Probe> probes;
  for (double a : grid) probes.push_back(probe_at(a));

  std::vector<const Probe*> valid;
  for (const Probe& p : probes)
    if (p.valid) valid.push_back(&p);

  if (valid.empty()) {
    std::pair<double, double> u = probes.front().range;
    for (const Probe& p : probes) {
      u.first = std::min(u.first, p.range.first);
      u.second = std::max(u.second, p.range.second);
    }
    throw out_of_attainable_range(tau_target, u);
  }

  double gmin = valid.front()->g, gmax = gmin;
  for (const Probe* p : valid) {
    gmin = std::min(gmin, p->g);
    gmax = std::max(gmax, p->g);
  }
  // A flat Spearman residual means the target pair cannot pin the slant,
  // whether or not it happens to match.
  if (valid.size() > 1 && gmax - gmin < tol)
    throw non_identified(
        "invert_equi_skew: the Spearman residual is flat in the slant "
        "across the probe grid; the target pair does not identify it");

  auto finish = [&](const Probe& p) {
    EquiSkewEstimate out;
    out.rho_hat = p.inner.rho_hat;
    out.a_hat = p.a;
    out.tau_residual = p.inner.residual;
    out.rhos_residual = p.g;
    out.iterations = inner_count;
    return out;
  };

  const Probe* best = valid.front();
  for (const Probe* p : valid)
    if (std::abs(p->g) < std::abs(best->g)) best = p;
  if (std::abs(best->g) <= tol) return finish(*best);

  // Bracket a sign change between adjacent valid probes, then bisect.
  const Probe* lo = nullptr;
  const Probe* hi = nullptr;
  for (std::size_t i = 0; i + 1 < valid.size(); ++i)
    if ((valid[i]->g > 0.0) != (valid[i + 1]->g > 0.0)) {
      lo = valid[i];
      hi = valid[i + 1];
      break;
    }
  if (!lo) {
    std::pair<double, double> achieved = {gmin + rhos_target,
                                          gmax + rhos_target};
    throw out_of_attainable_range(rhos_target, achieved);
  }

  Probe plo = *lo, phi = *hi;
  while (inner_count < kMaxIter) {
    Probe mid = probe_at(0.5 * (plo.a + phi.a));
    if (!mid.valid)
      throw no_convergence(
          "invert_equi_skew: Kendall target left the attainable range "
          "inside the slant bracket",
          inner_count);
    if (std::abs(mid.g) <= tol) return finish(mid);
    if ((mid.g > 0.0) == (plo.g > 0.0))
      plo = mid;
    else
      phi = mid;
    if (phi.a - plo.a < 1e-10)
      throw no_convergence(
          "invert_equi_skew: slant bracket collapsed before reaching the "
          "residual tolerance",
          inner_count);
  }
  throw no_convergence("invert_equi_skew: iteration cap reached", inner_count);
}

}  // namespace skewrank

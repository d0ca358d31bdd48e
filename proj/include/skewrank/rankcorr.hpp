#pragma once

// Population Kendall tau and Spearman rho for two bivariate copula families
// built on normal scale mixtures X = beta * W + sqrt(W) * Z:
//
//   MN  - Z bivariate normal with correlation rho, skew enters through the
//         location drift beta (skew = beta, generalized hyperbolic style);
//   MSN - Z bivariate skew-normal with slant alpha and no drift
//         (skew = alpha, Azzalini style).
//
// Both measures reduce to expectations of low-dimensional Gaussian orthant
// probabilities over functions of independent mixing draws; the functions
// here evaluate those expectations on randomized QMC nets, with closed
// forms where the dependence on the mixing law drops out.
//
// Every integrand is averaged over the four-element skew orbit
// {(s1, s2), (s2, s1), (-s1, -s2), (-s2, -s1)} in this fixed order. Each
// element leaves the expectation unchanged (margin exchange and joint
// reflection preserve concordance), and the shared-node average makes the
// exchange and reflection identities hold to machine precision instead of
// to QMC accuracy.

#include <Eigen/Dense>
#include <optional>

#include "skewrank/mixing.hpp"
#include "skewrank/qmc.hpp"

namespace skewrank {

enum class Family { MN, MSN };
enum class Measure { Kendall, Spearman };

// How a value was (or should be) computed. ClosedForm is only accepted on
// request when a closed form exists; ThmExpectation integrates the orthant
// representation (dimension 4 or 5 for MSN); CorBivariate integrates the
// cheaper bivariate-normal reduction of the MSN formulas.
enum class Method { ClosedForm, ThmExpectation, CorBivariate };

struct CopulaSpec {
  Family family = Family::MN;
  double rho = 0.0;
  Eigen::Vector2d skew = Eigen::Vector2d::Zero();  // beta (MN) or alpha (MSN)
  MixingSpec mixing = degenerate_mixing();
};

struct RankResult {
  Measure measure = Measure::Kendall;
  Method method = Method::ClosedForm;
  QmcEstimate estimate;  // raw value and honest replicate std error

  // Raw estimates can poke out of [-1, 1] by QMC noise; reported values
  // must not.
  double value() const noexcept;
};

// Marginal skewness delta, slant-to-delta and back. alpha_from_delta
// requires |rho| < 1 and delta strictly inside the admissible ellipse
// delta1^2 + delta2^2 - 2 rho delta1 delta2 < 1 - rho^2 (domain_error
// otherwise).
Eigen::Vector2d delta_from_alpha(double rho, const Eigen::Vector2d& alpha);
Eigen::Vector2d alpha_from_delta(double rho, const Eigen::Vector2d& delta);

// Parameters of the bivariate normal reduction of the MSN formulas:
// per-margin slants alpha_dagger_i = delta_i / sqrt(1 - delta_i^2) and the
// adjusted correlation rho_dagger. At rho = +-1 the results are exact:
// delta1 = +-delta2 and rho_dagger = +-1.
struct DerivedSkew {
  Eigen::Vector2d delta;
  Eigen::Vector2d alpha_dagger;
  double rho_dagger = 0.0;
};
DerivedSkew derived_skew(double rho, const Eigen::Vector2d& alpha);

// Closed-form specializations of derived_skew for equal slants
// alpha = (a, a) and for a single slant alpha = (a, 0); both must agree
// with the general map (property-tested).
struct EquiSkewDerived {
  double delta_bar = 0.0;
  double alpha_dagger_bar = 0.0;
  double rho_dagger = 0.0;
};
EquiSkewDerived equi_skew_derived(double rho, double a);

struct SingleSkewDerived {
  double delta_circ = 0.0;   // delta of the skewed margin, a / sqrt(1 + a^2)
  double rho_dagger = 0.0;   // rho / sqrt(1 + a^2 (1 - rho^2))
  double alpha2_dagger = 0.0;  // slant inherited by the unskewed margin
};
SingleSkewDerived single_skew_derived(double rho, double a);

// MN family. Kendall tau is (2/pi) asin(rho) whenever beta = 0 or the
// mixing law is degenerate; otherwise a 2-dimensional QMC expectation of
// bivariate normal cdfs. Spearman rho is (6/pi) asin(rho/2) under
// degenerate mixing, a 3-dimensional expectation otherwise (with a reduced
// arcsine integrand when beta = 0). `force` overrides the automatic
// closed-form/integration choice; requesting ClosedForm where none exists
// or CorBivariate (MSN-only) throws invalid_argument.
RankResult kendall_mn(double rho, const Eigen::Vector2d& beta,
                      const MixingSpec& mixing, const QmcConfig& cfg,
                      std::optional<Method> force = std::nullopt);
RankResult spearman_mn(double rho, const Eigen::Vector2d& beta,
                       const MixingSpec& mixing, const QmcConfig& cfg,
                       std::optional<Method> force = std::nullopt);

// MSN family. rho = +-1 is pinned to +-1 exactly (comonotone and
// countermonotone boundaries hold for every slant and mixing law). The
// default integration path is CorBivariate; ThmExpectation evaluates the
// 4- (Kendall) or 5-dimensional (Spearman) orthant representation and is
// the cross-check path.
RankResult kendall_msn(double rho, const Eigen::Vector2d& alpha,
                       const MixingSpec& mixing, const QmcConfig& cfg,
                       std::optional<Method> force = std::nullopt);
RankResult spearman_msn(double rho, const Eigen::Vector2d& alpha,
                        const MixingSpec& mixing, const QmcConfig& cfg,
                        std::optional<Method> force = std::nullopt);

// Skew-normal copula (MSN with degenerate mixing): the mixing expectation
// collapses and one orthant probability (ThmExpectation, default) or one
// bivariate expectation in the half-normal variables (CorBivariate)
// remains.
RankResult skew_normal_rankcorr(double rho, const Eigen::Vector2d& alpha,
                                Measure measure, const QmcConfig& cfg,
                                std::optional<Method> force = std::nullopt);

// Dispatch on family, measure, and mixing; `force` as above.
RankResult rank_correlation(const CopulaSpec& spec, Measure measure,
                            const QmcConfig& cfg,
                            std::optional<Method> force = std::nullopt);

// Difference of two rank correlations evaluated on shared QMC nodes, so
// that the std error reflects the difference integrand rather than two
// independent estimates. Requires both specs to resolve to the same
// integration dimension (closed forms pair with anything).
struct PairedDifference {
  double difference = 0.0;
  double std_error = 0.0;
  Method method_a = Method::ClosedForm;
  Method method_b = Method::ClosedForm;
  std::int64_t points_used = 0;
};
PairedDifference paired_difference(const CopulaSpec& a, const CopulaSpec& b,
                                   Measure measure, const QmcConfig& cfg,
                                   std::optional<Method> force = std::nullopt);

}  // namespace skewrank

#pragma once

// Inverse problems over the forward rank-correlation maps: recover the
// pseudo-correlation rho from a target rank value, or the pair (rho, a)
// of an equal-slant specification from a Kendall/Spearman target pair.

#include <utility>

#include "skewrank/qmc.hpp"
#include "skewrank/rankcorr.hpp"

namespace skewrank {

struct EstimateResult {
  double rho_hat = 0.0;
  double residual = 0.0;  // value(rho_hat) - target
  int iterations = 0;
  std::pair<double, double> bracket = {0.0, 0.0};     // final rho bracket
  std::pair<double, double> attainable = {0.0, 0.0};  // value range over rho
};

// Range of the measure over rho in [-1, 1] with skew and mixing fixed
// (spec.rho is ignored). MSN attains [-1, 1] exactly at the pinned
// boundaries; MN ranges come from evaluating the boundary values, which
// need not reach +-1 when the skews differ.
std::pair<double, double> attainable_range(const CopulaSpec& spec,
                                           Measure measure,
                                           const QmcConfig& cfg);

// Solve value(rho) = target for rho by Brent bracketing on [-1, 1]
// (spec.rho is ignored). tol bounds the accepted |residual|; because
// forward values carry QMC noise, the solver refuses tolerances tighter
// than 10x any observed std error (invalid_argument) rather than chase
// noise. Unreachable targets throw out_of_attainable_range carrying the
// observed range; more than 200 iterations throws no_convergence.
EstimateResult invert_rho(const CopulaSpec& spec, Measure measure,
                          double target, const QmcConfig& cfg, double tol);

// Joint inversion for equal slants skew = (a, a), a >= 0: match Kendall
// tau by the inner rho-inversion at each probed a, then drive the
// Spearman residual to zero in a. A Spearman residual flat to within tol
// across the probe grid means the pair carries no information about a
// (non_identified); a residual of one sign everywhere means the target
// pair is unreachable (out_of_attainable_range on the Spearman target).
struct EquiSkewEstimate {
  double rho_hat = 0.0;
  double a_hat = 0.0;
  double tau_residual = 0.0;
  double rhos_residual = 0.0;
  int iterations = 0;  // inner rho-inversions performed
};
EquiSkewEstimate invert_equi_skew(Family family, const MixingSpec& mixing,
                                  double tau_target, double rhos_target,
                                  const QmcConfig& cfg, double tol,
                                  double a_max = 8.0);

}  // namespace skewrank

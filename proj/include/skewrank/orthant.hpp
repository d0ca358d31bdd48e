#pragma once

// Gaussian orthant probabilities Phi_d(0; P) = P(X_1 <= 0, ..., X_d <= 0)
// for the structured correlation matrices of the scale-mixture rank
// formulas. d = 2 is closed form; d = 4 and 5 go through the
// separation-of-variables transform of Genz (1992) with greedy variable
// reordering, evaluated on QMC points.

#include <Eigen/Dense>
#include <array>
#include <span>

#include "skewrank/qmc.hpp"

namespace skewrank {

// A validated correlation matrix of dimension 2, 4, or 5: symmetric, unit
// diagonal, smallest eigenvalue >= -1e-10 (small negative eigenvalues are
// clipped to zero and the diagonal renormalized).
class CorrMatrix {
 public:
  static CorrMatrix from_matrix(const Eigen::MatrixXd& m);
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

 private:
  explicit CorrMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

// 4x4 correlation of the Kendall orthant representation: leading 2x2 block
// varrho(rho), skew rows delta_i * v_j, and an identity trailing block.
// |rho| = 1 is nudged to sign(rho) * (1 - 1e-12) so the Cholesky stays
// meaningful at the comonotone boundary.
CorrMatrix build_p_tau(double rho, const Eigen::Vector2d& delta,
                       const Eigen::Vector2d& v);

// 5x5 correlation of the Spearman orthant representation; v packs
// (v1, v2, v1minus, v2minus, v3).
CorrMatrix build_p_s(double rho, const Eigen::Vector2d& delta,
                     const std::array<double, 5>& v);

// Reordered Cholesky factorization plus the data needed to evaluate the
// Genz conditional-probability integrand.
struct GenzPlan {
  int dim = 0;
  Eigen::Matrix<double, 5, 5> chol = Eigen::Matrix<double, 5, 5>::Zero();
};

GenzPlan genz_plan(const CorrMatrix& p);

// One integrand sample: u has dim-1 coordinates in (0, 1); the expectation
// of genz_eval over the unit cube is the orthant probability.
double genz_eval(const GenzPlan& plan, std::span<const double> u);

// Orthant probability with an error estimate; d = 2 is exact
// (1/4 + asin(rho)/(2 pi), std_error 0).
QmcEstimate orthant_prob(const CorrMatrix& p, const QmcConfig& cfg);

namespace detail {
// Factorization without the CorrMatrix validation pass, for matrices that
// are correlation matrices by construction (the per-node expectation
// integrands). Only the leading dim x dim block of m is read.
GenzPlan genz_plan_unchecked(const Eigen::Matrix<double, 5, 5>& m, int dim);
}  // namespace detail

}  // namespace skewrank

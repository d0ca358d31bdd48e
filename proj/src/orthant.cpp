#include "skewrank/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "skewrank/specfun.hpp"

namespace skewrank {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kEigTol = -1e-10;  // smallest admissible eigenvalue
constexpr double kPivotTol = 1e-12; // conditional variance treated as zero

}  // namespace

CorrMatrix CorrMatrix::from_matrix(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != m.rows() || (d != 2 && d != 4 && d != 5))
    throw std::invalid_argument("CorrMatrix: dimension must be 2, 4, or 5");
  if (!m.allFinite())
    throw std::invalid_argument("CorrMatrix: entries must be finite");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol)
    throw std::invalid_argument("CorrMatrix: matrix is not symmetric");

  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  for (int i = 0; i < d; ++i) {
    if (std::abs(s(i, i) - 1.0) > kSymTol)
      throw std::invalid_argument("CorrMatrix: diagonal must be 1");
    s(i, i) = 1.0;
  }
  if (s.cwiseAbs().maxCoeff() > 1.0 + kSymTol)
    throw std::invalid_argument("CorrMatrix: entries must lie in [-1, 1]");

  // Fast path: strictly positive definite needs no spectral repair.
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return CorrMatrix(std::move(s));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double lo = eig.eigenvalues().minCoeff();
  if (lo < kEigTol)
    throw std::invalid_argument("CorrMatrix: matrix is not positive semidefinite");
  Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd r =
      eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  // Renormalize the diagonal disturbed by the clip.
  Eigen::VectorXd dinv = r.diagonal().cwiseSqrt().cwiseInverse();
  r = dinv.asDiagonal() * r * dinv.asDiagonal();
  for (int i = 0; i < d; ++i) r(i, i) = 1.0;
  return CorrMatrix(std::move(r));
}

CorrMatrix build_p_tau(double rho, const Eigen::Vector2d& delta,
                       const Eigen::Vector2d& v) {
  if (!(std::abs(rho) <= 1.0))
    throw std::domain_error("build_p_tau: |rho| must be <= 1");
  if (delta.cwiseAbs().maxCoeff() >= 1.0)
    throw std::domain_error("build_p_tau: need |delta_i| < 1");
  if (std::abs(v.squaredNorm() - 1.0) > 1e-9)
    throw std::domain_error("build_p_tau: v must be a unit vector");
  if (std::abs(rho) == 1.0) rho = std::copysign(1.0 - 1e-12, rho);

  Eigen::MatrixXd p(4, 4);
  p << 1.0, rho, delta(0) * v(0), delta(0) * v(1),
      rho, 1.0, delta(1) * v(0), delta(1) * v(1),
      delta(0) * v(0), delta(1) * v(0), 1.0, 0.0,
      delta(0) * v(1), delta(1) * v(1), 0.0, 1.0;
  return CorrMatrix::from_matrix(p);
}

CorrMatrix build_p_s(double rho, const Eigen::Vector2d& delta,
                     const std::array<double, 5>& v) {
  if (!(std::abs(rho) <= 1.0))
    throw std::domain_error("build_p_s: |rho| must be <= 1");
  if (delta.cwiseAbs().maxCoeff() >= 1.0)
    throw std::domain_error("build_p_s: need |delta_i| < 1");
  if (std::abs(rho) == 1.0) rho = std::copysign(1.0 - 1e-12, rho);

  const double v1 = v[0], v2 = v[1], v1m = v[2], v2m = v[3], v3 = v[4];
  Eigen::MatrixXd p(5, 5);
  p << 1.0, rho * v3, delta(0) * v1, 0.0, delta(0) * v1m,
      rho * v3, 1.0, 0.0, delta(1) * v2, delta(1) * v2m,
      delta(0) * v1, 0.0, 1.0, 0.0, 0.0,
      0.0, delta(1) * v2, 0.0, 1.0, 0.0,
      delta(0) * v1m, delta(1) * v2m, 0.0, 0.0, 1.0;
  return CorrMatrix::from_matrix(p);
}

namespace {

// Reordered Cholesky in the style of Genz & Bretz: at each stage pick the
// remaining variable with the smallest conditional probability of its
// constraint, conditioning on truncated expectations of the factored ones.
// Zero pivots (semidefinite input) zero out the column; the variable then
// contributes a deterministic indicator at evaluation time.
GenzPlan plan_impl(Eigen::Matrix<double, 5, 5> c, int d) {
  std::array<double, 5> y{};

  for (int i = 0; i < d; ++i) {
    int best = i;
    double best_prob = std::numeric_limits<double>::infinity();
    for (int j = i; j < d; ++j) {
      double num = 0.0, den = c(j, j);
      for (int k = 0; k < i; ++k) {
        num -= c(j, k) * y[k];
        den -= c(j, k) * c(j, k);
      }
      const double prob = den > kPivotTol
                              ? norm_cdf(num / std::sqrt(den))
                              : (num >= 0.0 ? 1.0 : 0.0);
      if (prob < best_prob - 1e-15) {
        best_prob = prob;
        best = j;
      }
    }
    if (best != i) {
      c.row(i).swap(c.row(best));
      c.col(i).swap(c.col(best));
    }

    double den = c(i, i);
    for (int k = 0; k < i; ++k) den -= c(i, k) * c(i, k);
    if (den > kPivotTol) {
      c(i, i) = std::sqrt(den);
      for (int j = i + 1; j < d; ++j) {
        double s = c(j, i);
        for (int k = 0; k < i; ++k) s -= c(j, k) * c(i, k);
        c(j, i) = s / c(i, i);
      }
      double num = 0.0;
      for (int k = 0; k < i; ++k) num -= c(i, k) * y[k];
      const double z = num / c(i, i);
      const double e = norm_cdf(z);
      y[i] = e > 1e-300 ? -norm_pdf(z) / e : z;
    } else {
      c(i, i) = 0.0;
      for (int j = i + 1; j < d; ++j) c(j, i) = 0.0;
      y[i] = 0.0;
    }
  }

  GenzPlan plan;
  plan.dim = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) plan.chol(i, j) = c(i, j);
  return plan;
}

}  // namespace

GenzPlan genz_plan(const CorrMatrix& p) {
  Eigen::Matrix<double, 5, 5> c = Eigen::Matrix<double, 5, 5>::Identity();
  c.topLeftCorner(p.dim(), p.dim()) = p.matrix();
  return plan_impl(c, p.dim());
}

GenzPlan detail::genz_plan_unchecked(const Eigen::Matrix<double, 5, 5>& m,
                                     int dim) {
  return plan_impl(m, dim);
}

double genz_eval(const GenzPlan& plan, std::span<const double> u) {
  const int d = plan.dim;
  if (static_cast<int>(u.size()) != d - 1)
    throw std::invalid_argument("genz_eval: need dim-1 coordinates");

  std::array<double, 5> y{};
  double f = plan.chol(0, 0) > 0.0 ? 0.5 : 1.0;
  double e_prev = f;
  for (int i = 1; i < d; ++i) {
    const double t =
        std::clamp(u[i - 1] * e_prev, std::numeric_limits<double>::min(),
                   1.0 - 1e-16);
    y[i - 1] = plan.chol(i - 1, i - 1) > 0.0 ? norm_quantile(t) : 0.0;

    double num = 0.0;
    for (int k = 0; k < i; ++k) num -= plan.chol(i, k) * y[k];
    double e;
    if (plan.chol(i, i) > 0.0)
      e = norm_cdf(num / plan.chol(i, i));
    else
      e = num >= 0.0 ? 1.0 : 0.0;
    f *= e;
    if (f == 0.0) return 0.0;
    e_prev = e;
  }
  return f;
}

QmcEstimate orthant_prob(const CorrMatrix& p, const QmcConfig& cfg) {
  if (p.dim() == 2) {
    const double rho = std::clamp(p.matrix()(0, 1), -1.0, 1.0);
    QmcEstimate est;
    est.value = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
    est.std_error = 0.0;
    est.points_used = 1;
    return est;
  }
  const GenzPlan plan = genz_plan(p);
  return integrate(
      [&plan](std::span<const double> u) { return genz_eval(plan, u); },
      p.dim() - 1, cfg);
}

}  // namespace skewrank

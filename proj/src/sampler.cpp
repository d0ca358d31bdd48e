#include "skewrank/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "skewrank/errors.hpp"

namespace skewrank {

namespace {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

struct NormalPair {
  double z1, z2;
};

NormalPair box_muller(double u1, double u2) noexcept {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

constexpr std::uint64_t kStride = 8;  // counters reserved per draw

void check_sample_args(double rho, const Eigen::Vector2d& skew,
                       std::int64_t n) {
  if (!(std::abs(rho) < 1.0))
    throw std::domain_error("sampler: need |rho| < 1");
  if (!skew.allFinite())
    throw std::domain_error("sampler: skew must be finite");
  if (n < 1) throw std::invalid_argument("sampler: need n >= 1");
}

// Inversions of a[lo, hi) counted during merge sort.
std::uint64_t merge_count(std::vector<double>& a, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t cnt = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      cnt += mid - i;
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return cnt;
}

void check_data(const Eigen::MatrixX2d& x) {
  if (x.rows() < 2)
    throw std::invalid_argument("rank statistic: need at least 2 rows");
  if (!x.allFinite())
    throw std::invalid_argument("rank statistic: data must be finite");
}

void check_no_ties(std::vector<double> col, int coordinate) {
  std::sort(col.begin(), col.end());
  if (std::adjacent_find(col.begin(), col.end()) != col.end())
    throw tie_error(coordinate);
}

// Rank of each row's value within its column, 1-based; assumes no ties.
std::vector<double> ranks_of(const Eigen::MatrixX2d& x, int col) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&x, col](std::size_t a, std::size_t b) {
    return x(static_cast<Eigen::Index>(a), col) <
           x(static_cast<Eigen::Index>(b), col);
  });
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k)
    r[idx[k]] = static_cast<double>(k + 1);
  return r;
}

}  // namespace

double CounterRng::uniform_at(std::uint64_t counter) const noexcept {
  const std::uint64_t bits =
      mix64(seed_ + 0x9e3779b97f4a7c15ULL * (counter + 1));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

Eigen::MatrixX2d sample_mn(double rho, const Eigen::Vector2d& beta,
                           const MixingSpec& mixing, std::int64_t n,
                           CounterRng& rng) {
  check_sample_args(rho, beta, n);
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  const std::uint64_t base = rng.counter();
  Eigen::MatrixX2d x(n, 2);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t c = base + kStride * static_cast<std::uint64_t>(i);
    const double w = quantile(mixing, rng.uniform_at(c));
    const auto z = box_muller(rng.uniform_at(c + 1), rng.uniform_at(c + 2));
    const double rw = std::sqrt(w);
    x(i, 0) = beta(0) * w + rw * z.z1;
    x(i, 1) = beta(1) * w + rw * (rho * z.z1 + s * z.z2);
  }
  rng.advance(kStride * static_cast<std::uint64_t>(n));
  return x;
}

Eigen::MatrixX2d sample_msn(double rho, const Eigen::Vector2d& alpha,
                            const MixingSpec& mixing, std::int64_t n,
                            CounterRng& rng) {
  check_sample_args(rho, alpha, n);
  const Eigen::Vector2d delta = delta_from_alpha(rho, alpha);
  Eigen::Matrix3d a;
  a << 1.0, delta(0), delta(1),
      delta(0), 1.0, rho,
      delta(1), rho, 1.0;
  Eigen::LLT<Eigen::Matrix3d> llt(a);
  if (llt.info() != Eigen::Success)
    throw numeric_error(
        "sample_msn: extended correlation matrix is not positive definite");
  const Eigen::Matrix3d l = llt.matrixL();

  const std::uint64_t base = rng.counter();
  Eigen::MatrixX2d x(n, 2);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t c = base + kStride * static_cast<std::uint64_t>(i);
    const double w = quantile(mixing, rng.uniform_at(c));
    const auto p1 = box_muller(rng.uniform_at(c + 1), rng.uniform_at(c + 2));
    const auto p2 = box_muller(rng.uniform_at(c + 3), rng.uniform_at(c + 4));
    const Eigen::Vector3d t = l * Eigen::Vector3d(p1.z1, p1.z2, p2.z1);
    const double sign = t(0) > 0.0 ? 1.0 : -1.0;
    const double rw = std::sqrt(w);
    x(i, 0) = rw * sign * t(1);
    x(i, 1) = rw * sign * t(2);
  }
  rng.advance(kStride * static_cast<std::uint64_t>(n));
  return x;
}

double empirical_kendall(const Eigen::MatrixX2d& x) {
  check_data(x);
  const std::size_t n = static_cast<std::size_t>(x.rows());

  std::vector<std::pair<double, double>> p(n);
  for (std::size_t i = 0; i < n; ++i)
    p[i] = {x(static_cast<Eigen::Index>(i), 0),
            x(static_cast<Eigen::Index>(i), 1)};
  std::sort(p.begin(), p.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < n; ++i)
    if (p[i].first == p[i - 1].first) throw tie_error(1);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = p[i].second;
  check_no_ties(y, 2);

  std::vector<double> buf(n);
  const std::uint64_t d = merge_count(y, buf, 0, n);
  const double pairs =
      static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  return 1.0 - 4.0 * static_cast<double>(d) / pairs;
}

double empirical_spearman(const Eigen::MatrixX2d& x) {
  check_data(x);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  {
    std::vector<double> c0(n), c1(n);
    for (std::size_t i = 0; i < n; ++i) {
      c0[i] = x(static_cast<Eigen::Index>(i), 0);
      c1[i] = x(static_cast<Eigen::Index>(i), 1);
    }
    check_no_ties(std::move(c0), 1);
    check_no_ties(std::move(c1), 2);
  }
  const std::vector<double> rx = ranks_of(x, 0);
  const std::vector<double> ry = ranks_of(x, 1);
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

OracleEstimate oracle_check(const CopulaSpec& spec, Measure measure,
                            std::int64_t n, int batches, CounterRng& rng) {
  if (n < 1000)
    throw std::invalid_argument("oracle_check: need n >= 1000");
  if (batches < 10)
    throw std::invalid_argument("oracle_check: need batches >= 10");

  const std::uint64_t base = rng.counter();
  const std::uint64_t per_batch = kStride * static_cast<std::uint64_t>(n);
  std::vector<double> stat(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    CounterRng sub(rng.seed(),
                   base + static_cast<std::uint64_t>(b) * per_batch);
    const Eigen::MatrixX2d x =
        spec.family == Family::MN
            ? sample_mn(spec.rho, spec.skew, spec.mixing, n, sub)
            : sample_msn(spec.rho, spec.skew, spec.mixing, n, sub);
    stat[static_cast<std::size_t>(b)] =
        measure == Measure::Kendall ? empirical_kendall(x)
                                    : empirical_spearman(x);
  }
  rng.advance(static_cast<std::uint64_t>(batches) * per_batch);

  double mean = 0.0;
  for (double s : stat) mean += s;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double s : stat) var += (s - mean) * (s - mean);
  var /= static_cast<double>(batches - 1);

  OracleEstimate out;
  out.value = mean;
  out.std_error = std::sqrt(var / static_cast<double>(batches));
  out.n = n;
  out.batches = batches;
  return out;
}

}  // namespace skewrank

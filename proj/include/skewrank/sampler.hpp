#pragma once

// Monte Carlo oracles for the copula rank formulas: counter-based sampling
// of both families and empirical Kendall / Spearman statistics. Sampling
// never touches the QMC machinery, so agreement between oracle_check and
// the analytic values is an independent cross-validation.

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "skewrank/rankcorr.hpp"

namespace skewrank {

// Counter-mode uniforms: output k of a stream is a splitmix64 finalizer of
// seed and k, so draw i of a batch reads a fixed counter range and batches
// can be partitioned deterministically without sharing state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), counter_(counter) {}

  // Strictly inside (0, 1): (bits >> 11 + 0.5) * 2^-53.
  double next_uniform() noexcept { return uniform_at(counter_++); }
  double uniform_at(std::uint64_t counter) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void advance(std::uint64_t n) noexcept { counter_ += n; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

// Draw n rows of the MN copula's underlying vector beta * W + sqrt(W) * Z.
// Each draw reads 8 counters starting at rng.counter() + 8 * i; the rng is
// advanced by 8 * n. Requires |rho| < 1.
Eigen::MatrixX2d sample_mn(double rho, const Eigen::Vector2d& beta,
                           const MixingSpec& mixing, std::int64_t n,
                           CounterRng& rng);

// Draw n rows of the MSN vector sqrt(W) * Z with Z bivariate skew-normal
// (selection representation: condition a trivariate normal on a positive
// first coordinate). Same counter layout as sample_mn.
Eigen::MatrixX2d sample_msn(double rho, const Eigen::Vector2d& alpha,
                            const MixingSpec& mixing, std::int64_t n,
                            CounterRng& rng);

// Sample Kendall tau via merge-sort inversion counting, O(n log n).
// Ties in either coordinate throw tie_error (rank statistics of a
// continuous model are undefined under ties, and a tie signals broken
// input rather than bad luck).
double empirical_kendall(const Eigen::MatrixX2d& x);

// Sample Spearman rho: 1 - 6 sum d^2 / (n (n^2 - 1)) with d the rank
// differences, the Pearson correlation of the ranks when there are no
// ties. Ties throw tie_error.
double empirical_spearman(const Eigen::MatrixX2d& x);

// Batch-mean Monte Carlo estimate of a population rank measure: `batches`
// independent samples of size n, each reduced to its empirical statistic;
// the std error is the batch-mean spread. Requires n >= 1000 and
// batches >= 10 so the std error means something.
struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  int batches = 0;
};
OracleEstimate oracle_check(const CopulaSpec& spec, Measure measure,
                            std::int64_t n, int batches, CounterRng& rng);

}  // namespace skewrank

#pragma once

// Randomized quasi-Monte Carlo on the open unit cube: Sobol points in up to
// 8 dimensions with a digitally shifted replicate scheme. The replicate
// spread is the only error estimate the engine reports, so every consumer of
// QmcEstimate inherits an honest standard error.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace skewrank {

struct QmcConfig {
  int points = 1 << 14;     // per replicate; power of two, >= 16
  int replicates = 8;       // >= 2
  std::uint64_t seed = 1234;
};

struct QmcEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long points_used = 0;
};

// First n points (indices 1..n of the Gray-code sequence; the all-zero index
// 0 point is skipped) of the Sobol sequence in dim <= 8 dimensions,
// row-major n x dim. n must be a power of two. shift_seed = 0 yields the
// unshifted base sequence; any other seed applies an independent digital
// shift per dimension with the lowest bit forced on, so every coordinate
// lies strictly inside (0, 1).
std::vector<double> sobol_points(int dim, int n, std::uint64_t shift_seed);

// Randomized QMC integral of f over (0,1)^dim: cfg.replicates independently
// shifted Sobol nets of cfg.points each; value is the replicate mean,
// std_error the replicate standard deviation over sqrt(replicates). Throws
// numeric_error naming the offending point if f returns a non-finite value.
QmcEstimate integrate(const std::function<double(std::span<const double>)>& f,
                      int dim, const QmcConfig& cfg);

void validate(const QmcConfig& cfg);

}  // namespace skewrank

#include "skewrank/qmc.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "skewrank/errors.hpp"

namespace skewrank {

namespace {

constexpr int kMaxDim = 8;
constexpr int kBits = 53;  // direction integers carry a full double mantissa
constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53

// Primitive-polynomial parameters for dimensions 2..8 from the Joe-Kuo
// direction-number tables (new-joe-kuo-6); dimension 1 is the van der Corput
// sequence in base 2.
struct JoeKuo {
  int s;                      // polynomial degree
  unsigned a;                 // interior coefficient bits
  std::array<unsigned, 5> m;  // initial direction integers
};
constexpr std::array<JoeKuo, 7> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
}};

// splitmix64 finalizer; the k-th output for a given seed is a pure function
// of (seed, k).
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct DirectionTable {
  // direction[d][k], k = 0..kBits-1, bit kBits-1-k is the leading bit
  std::array<std::array<std::uint64_t, kBits>, kMaxDim> v{};
  DirectionTable() {
    for (int k = 0; k < kBits; ++k) v[0][k] = 1ULL << (kBits - 1 - k);
    for (int d = 1; d < kMaxDim; ++d) {
      const JoeKuo& p = kJoeKuo[d - 1];
      for (int k = 0; k < p.s; ++k)
        v[d][k] = static_cast<std::uint64_t>(p.m[k]) << (kBits - 1 - k);
      for (int k = p.s; k < kBits; ++k) {
        std::uint64_t val = v[d][k - p.s] ^ (v[d][k - p.s] >> p.s);
        for (int j = 1; j < p.s; ++j)
          if (p.a >> (p.s - 1 - j) & 1U) val ^= v[d][k - j];
        v[d][k] = val;
      }
    }
  }
};

const DirectionTable& directions() {
  static const DirectionTable t;
  return t;
}

void shifts_for(std::uint64_t shift_seed, int dim,
                std::array<std::uint64_t, kMaxDim>& shift) {
  for (int d = 0; d < dim; ++d) {
    if (shift_seed == 0) {
      shift[d] = 0;
    } else {
      // Forcing the low bit on keeps every shifted coordinate off 0 exactly:
      // Gray-code states never reach bit 0 at practical point counts.
      shift[d] = (mix64(shift_seed + static_cast<std::uint64_t>(d)) &
                  ((1ULL << kBits) - 1)) |
                 1ULL;
    }
  }
}

void check_dims(int dim, int n) {
  if (dim < 1 || dim > kMaxDim)
    throw std::domain_error("sobol: dimension must lie in 1..8");
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::domain_error("sobol: point count must be a power of two");
}

}  // namespace

void validate(const QmcConfig& cfg) {
  if (cfg.points < 16 || (cfg.points & (cfg.points - 1)) != 0)
    throw std::invalid_argument("QmcConfig: points must be a power of two >= 16");
  if (cfg.replicates < 2)
    throw std::invalid_argument("QmcConfig: need at least 2 replicates");
}

std::vector<double> sobol_points(int dim, int n, std::uint64_t shift_seed) {
  check_dims(dim, n);
  const DirectionTable& t = directions();
  std::array<std::uint64_t, kMaxDim> shift{};
  shifts_for(shift_seed, dim, shift);

  std::vector<double> out(static_cast<std::size_t>(n) * dim);
  std::array<std::uint64_t, kMaxDim> state{};
  for (int i = 1; i <= n; ++i) {
    const int c = std::countr_one(static_cast<std::uint64_t>(i - 1));
    for (int d = 0; d < dim; ++d) {
      state[d] ^= t.v[d][c];
      out[static_cast<std::size_t>(i - 1) * dim + d] =
          static_cast<double>(state[d] ^ shift[d]) * kScale;
    }
  }
  return out;
}

QmcEstimate integrate(const std::function<double(std::span<const double>)>& f,
                      int dim, const QmcConfig& cfg) {
  if (dim < 1 || dim > kMaxDim)
    throw std::domain_error("integrate: dimension must lie in 1..8");
  validate(cfg);

  const DirectionTable& t = directions();
  std::array<double, 32> rep_mean{};
  if (cfg.replicates > 32)
    throw std::invalid_argument("QmcConfig: at most 32 replicates");

  std::array<double, kMaxDim> point{};
  for (int r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t rep_seed =
        mix64(cfg.seed ^ (0x517cc1b727220a95ULL * (r + 1))) | 1ULL;
    std::array<std::uint64_t, kMaxDim> shift{};
    shifts_for(rep_seed, dim, shift);

    std::array<std::uint64_t, kMaxDim> state{};
    double sum = 0.0;
    for (int i = 1; i <= cfg.points; ++i) {
      const int c = std::countr_one(static_cast<std::uint64_t>(i - 1));
      for (int d = 0; d < dim; ++d) {
        state[d] ^= t.v[d][c];
        point[d] = static_cast<double>(state[d] ^ shift[d]) * kScale;
      }
      const double y = f(std::span<const double>(point.data(), dim));
      if (!std::isfinite(y)) {
        std::ostringstream msg;
        msg << "integrate: non-finite integrand value at point (";
        for (int d = 0; d < dim; ++d)
          msg << (d ? ", " : "") << point[d];
        msg << ")";
        throw numeric_error(msg.str());
      }
      sum += y;
    }
    rep_mean[r] = sum / cfg.points;
  }

  double mean = 0.0;
  for (int r = 0; r < cfg.replicates; ++r) mean += rep_mean[r];
  mean /= cfg.replicates;
  double var = 0.0;
  for (int r = 0; r < cfg.replicates; ++r) {
    const double d = rep_mean[r] - mean;
    var += d * d;
  }
  var /= (cfg.replicates - 1.0);

  QmcEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(var / cfg.replicates);
  est.points_used = static_cast<long>(cfg.points) * cfg.replicates;
  return est;
}

}  // namespace skewrank

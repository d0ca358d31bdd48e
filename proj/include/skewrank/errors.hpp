#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace skewrank {

// Numerical failure inside an algorithm (non-finite integrand, Cholesky
// breakdown, quadrature breakdown). Domain violations on inputs use
// std::domain_error / std::invalid_argument directly.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finder exhausted its iteration budget.
class no_convergence : public numeric_error {
 public:
  explicit no_convergence(const std::string& what, int iterations)
      : numeric_error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_ = 0;
};

// Requested rank-correlation target lies outside the attainable interval of
// the model family; carries the interval so callers can report it.
class out_of_attainable_range : public std::runtime_error {
 public:
  out_of_attainable_range(double target, std::pair<double, double> range)
      : std::runtime_error("target " + std::to_string(target) +
                           " outside attainable range [" +
                           std::to_string(range.first) + ", " +
                           std::to_string(range.second) + "]"),
        target_(target),
        range_(range) {}
  double target() const noexcept { return target_; }
  std::pair<double, double> range() const noexcept { return range_; }

 private:
  double target_;
  std::pair<double, double> range_;
};

// Two-moment estimation cannot separate the parameters: the residual surface
// is flat below tolerance across the search bracket.
class non_identified : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tied values in data meant for rank statistics; coordinate is 1 or 2.
class tie_error : public std::runtime_error {
 public:
  explicit tie_error(int coordinate)
      : std::runtime_error("tied values in coordinate " +
                           std::to_string(coordinate) +
                           "; rank statistics are undefined under ties"),
        coordinate_(coordinate) {}
  int coordinate() const noexcept { return coordinate_; }

 private:
  int coordinate_ = 0;
};

}  // namespace skewrank

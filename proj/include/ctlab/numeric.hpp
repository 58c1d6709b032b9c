#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ctlab/errors.hpp"

namespace ctlab {

// Neumaier-compensated running sum. Feeding the same terms in the same order
// always yields the same value, so prefix sums and fresh sums agree bitwise.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Closed interval [lo, hi] used for every estimate that cannot be pinned to
/// a point value.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double v, double slack = 0.0) const noexcept {
    return v >= lo - slack && v <= hi + slack;
  }
};

inline Bracket hull(double a, double b) noexcept { return {std::min(a, b), std::max(a, b)}; }

/// Least-squares slope of ys against xs.
inline double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorKind::degenerate_fit, "need at least two samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::degenerate_fit, "abscissae coincide");
  return sxy / sxx;
}

/// log(sum(exp(v))) without overflow; -inf for an empty input.
inline double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  CompensatedSum s;
  for (double x : v) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

}  // namespace ctlab

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctlab/bowen.hpp"
#include "ctlab/numeric.hpp"

namespace ctlab {

/// Predicate selecting orbit segments (x, n).
using SegmentFilter = std::function<bool(const Point&, long long)>;

inline bool accept_all(const Point&, long long) { return true; }

struct PartitionValue {
  long long n = 0;
  double delta = 0.0, eps = 0.0;
  double log_lower = 0.0, log_upper = 0.0;
  double lower = 0.0, upper = 0.0;
  bool empty = false;  // filter rejected every candidate
  bool exact = false;  // the greedy sum is the grid optimum (ultrametric case)
  long long candidates = 0, kept = 0;
  long long members_lower = 0, members_upper = 0;
  std::string grid;
};

struct PressureOptions {
  GridSpec grid;
  BallSampling sampling;
  int workers = 1;
  /// Also evaluate the lower sum at 2 delta on the same grids.
  bool check_delta_monotonicity = false;
};

/// Lambda at (n, delta, eps). The lower value is the greedy separated sum
/// with weights exp(Phi_eps); the upper value is the greedy sum at delta / 2,
/// which dominates every (n, delta)-separated subset of the grid. On shifts
/// the neighbour relation is an equivalence, the greedy sum is optimal and
/// both values coincide.
PartitionValue partition_function(const SystemModel& system, const Potential& potential,
                                  const SegmentFilter& filter, long long n, double delta, double eps,
                                  const PressureOptions& options);

struct PressureSample {
  long long n = 0;
  double log_lower = 0.0, log_upper = 0.0;
  bool empty = false;
  long long members_lower = 0, members_upper = 0;
  std::optional<double> log_lower_2delta;
};

struct PressureEstimate {
  std::vector<PressureSample> samples;
  double delta = 0.0, eps = 0.0;
  /// Bracket on the growth rate: fitted slopes of both series over the upper
  /// half of n_range and over its last half, widened by the difference
  /// between the two windows (a preasymptotic drift allowance).
  double slope_lower = 0.0, slope_upper = 0.0;
  double fit_lower = 0.0, fit_upper = 0.0;  // raw upper-half slopes
  double drift = 0.0;
  long long fit_min = 0, fit_max = 0;
  std::string grid;
  std::optional<bool> monotone_in_delta;

  Bracket bracket() const { return {slope_lower, slope_upper}; }
};

PressureEstimate pressure_at_scale(const SystemModel& system, const Potential& potential,
                                   const SegmentFilter& filter, double delta, double eps,
                                   const std::vector<long long>& n_range,
                                   const PressureOptions& options);

/// Fit helper shared with the entropy estimators: series[i] is log Lambda at
/// ns[i], given as (lower, upper).
void fit_growth(PressureEstimate& est, const std::vector<long long>& ns,
                const std::vector<double>& lower, const std::vector<double>& upper);

/// Exact pressure of a locally constant potential on the full k-shift: log of
/// the Perron eigenvalue of the weighted k^m x k^m word-extension matrix.
double transfer_pressure_oracle(int k, const Potential& potential);

struct Atom {
  Point point;
  double weight = 0.0;
};

struct EmpiricalMeasure {
  std::vector<Atom> atoms;
  long long n = 0;

  double integrate(const std::function<double(const Point&)>& f) const;
  /// (1/n) sum_k f^k_* of this measure.
  EmpiricalMeasure orbit_average(const SystemModel& system) const;
};

/// Normalised exp(Phi_0) weights on a greedy (n, delta)-separated set.
EmpiricalMeasure empirical_equilibrium(const SystemModel& system, const Potential& potential,
                                       long long n, double delta, const GridSpec& grid,
                                       int workers = 1);

}  // namespace ctlab

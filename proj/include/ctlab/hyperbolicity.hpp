#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctlab/pressure.hpp"

namespace ctlab {

/// (1/n) sum_{k<n} log ||Df|_{E_label}(f^k x)||.
double finite_time_exponent(const SystemModel& system, const Point& x, long long n, const std::string& label);

struct ExponentEntry {
  std::string label;
  double exponent = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
  std::optional<double> exact;  // log|eigenvalue| for linear models
};

struct ExponentReport {
  std::vector<ExponentEntry> bundles;
  double sum() const;
};

/// Finite-time exponents of every bundle along the orbit of a seeded random point.
ExponentReport exponent_report(const SystemModel& system, long long n, std::uint64_t seed);

struct CentralObservables {
  Observable beta1;      // max of the first i forward central log-norms
  Observable beta2_hat;  // min of the remaining backward central log-norms
  std::vector<std::string> first, second;
};

/// Requires 1 <= i <= k - 1 for k central bundles.
CentralObservables central_observables(const SystemModel& system, int i);

/// Integral of each central forward log-norm against a measure.
std::map<std::string, double> averaged_central_exponents(const SystemModel& system,
                                                         const EmpiricalMeasure& mu);

struct EntropyScale {
  double delta = 0.0;
  PressureEstimate estimate;
};

struct EntropyEstimate {
  std::vector<EntropyScale> scales;  // in the order given
  /// Bracket at the smallest delta.
  Bracket headline() const;
};

EntropyEstimate entropy_estimate(const SystemModel& system, const std::vector<double>& deltas,
                                 const std::vector<long long>& n_range, const PressureOptions& options);

struct UnstableSeed {
  Point seed;
  std::vector<long long> count_lower;  // maximal (n, delta)-separated count per n
  std::vector<long long> count_upper;  // greedy (n, delta / 2) count per n
};

struct UnstableEntropyEstimate {
  std::string label;
  double log_rate = 0.0;
  double delta = 0.0, disk_radius = 0.0;
  std::vector<UnstableSeed> seeds;
  PressureEstimate fit;  // growth fit of the per-n maxima over seeds
  Bracket bracket() const { return fit.bracket(); }
};

struct UnstableOptions {
  double oversample = 4.0;
  int workers = 1;
};

/// Separated sets inside the closed unstable disk of radius `disk_radius`
/// around each seed, in the leaf metric d^u_n. Linear models only: the disk
/// is the segment x + t v_u, |t| <= disk_radius.
UnstableEntropyEstimate unstable_entropy_estimate(const SystemModel& system, double delta,
                                                  const std::vector<long long>& n_range, double disk_radius,
                                                  const std::vector<Point>& seeds,
                                                  const UnstableOptions& options = {});

struct EntropyGapConfig {
  std::vector<double> entropy_deltas{0.02};
  std::vector<long long> entropy_n{1, 2, 3, 4, 5};
  PressureOptions pressure;
  double unstable_delta = 0.01;
  std::vector<long long> unstable_n{1, 2, 3, 4, 5, 6, 7, 8};
  double disk_radius = 0.1;
  int seeds = 4;
  std::uint64_t seed = 0;
};

struct EntropyGapReport {
  Bracket h_top, h_u, h_s;
  double sup_phi = 0.0, inf_phi = 0.0;
  /// h_top lower end minus the larger upper end of h_u, h_s, minus the oscillation.
  double margin = 0.0;
  Bracket margin_bracket;
  bool holds = false;
  std::string grid;
};

EntropyGapReport entropy_gap_report(const SystemModel& system, const Potential& potential,
                                    const EntropyGapConfig& config);

}  // namespace ctlab

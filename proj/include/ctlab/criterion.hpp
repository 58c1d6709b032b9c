#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctlab/decomposition.hpp"

namespace ctlab {

struct BowenPropertyConfig {
  double C = 1.0;       // plaque contraction constant
  double delta0 = 0.1;  // transversal intersection displacement bound
  double r = 0.1;
  double Q = 1.0;
  double alpha = 1.0;

  void validate() const;
};

struct KSeries {
  double K = 0.0;
  long long terms = 0;
  double tail_bound = 0.0;
};

/// K = Q (C delta0)^alpha sum_{k >= 0} (e^{-kr/2} + e^{-kr/4})^alpha, truncated
/// once the tail bound e^{-k r alpha / 4} 2^alpha / (1 - e^{-r alpha / 4})
/// drops below 1e-12.
KSeries bowen_constant(const BowenPropertyConfig& config);

struct DistortionRecord {
  long long n = 0;
  double distortion = 0.0;  // sup over samples for this segment
  long long samples = 0;
};

struct BowenReport {
  double empirical_sup = 0.0;
  KSeries theory;
  bool holds = false;  // empirical_sup <= K
  long long segments = 0, skipped_not_in_G = 0, samples = 0;
  std::vector<DistortionRecord> records;

  /// Largest recorded distortion over segments with lo <= n <= hi.
  double sup_over(long long lo, long long hi) const;
};

/// Empirical sup of |Phi_0(x, n) - Phi_0(y, n)| over sampled y in B_n(x, eps).
/// Toral models displace along real orbits f^k x + A^k w, so long segments
/// keep nontrivial balls; other models use sample_bowen_ball. When `obs` is
/// given, segments outside G(config.r) are skipped and counted.
BowenReport bowen_property_check(const SystemModel& system, const Potential& potential,
                                 const std::vector<Segment>& segments, double eps,
                                 const BowenPropertyConfig& config, const BallSampling& sampling = {},
                                 const CentralObservables* obs = nullptr, int workers = 1);

struct SpecificationResult {
  bool ok = false;
  Point y;
  std::vector<long long> gaps;      // tau_i between consecutive segments
  std::vector<double> distances;    // verified d_{n_j}(f^{start_j} y, x_j)
  std::vector<long long> starts;    // start times of each segment along y
  long long predicted_gap = 0;      // ceil(log(4 / delta) / log lambda_u); 0 on shifts
  std::string note;
};

/// Glues the segments into one orbit: shifts concatenate the segment words,
/// toral automorphisms solve the linear shadowing problem one junction at a
/// time. The result is always verified by direct evaluation.
SpecificationResult specification_search(const SystemModel& system, const std::vector<Segment>& segments,
                                         double delta, long long max_gap = 64);

struct WindowGrid {
  int directions = 64;  // random unit directions added to the eigen-directions
  std::uint64_t seed = 0;
};

/// Diameter of {y : d(f^k x, f^k y) <= eps for all |k| <= N}, over the
/// displacement directions of `grid` (exact on shifts).
double expansivity_window(const SystemModel& system, const Point& x, double eps, long long N,
                          const WindowGrid& grid = {});

struct SeedWindows {
  Point seed;
  std::vector<double> diameters;  // N = 1..N_max
  double late_ratio = 0.0;        // geometric mean of diam(N+1)/diam(N) over the second half
  bool flagged = false;
};

struct ExpansivityReport {
  std::vector<SeedWindows> seeds;
  bool empty = true;  // no flagged seeds
  std::optional<PressureEstimate> pressure;  // restricted to segments through flagged seeds
  std::string note;
};

struct PexpOptions {
  int seeds = 8;
  long long N = 12;
  double flag_ratio = 0.95;  // flagged when windows shrink slower than this per step
  WindowGrid grid;
  std::vector<long long> n_range{1, 2, 3, 4, 5};
  double delta = 0.05;
  PressureOptions pressure;
  std::uint64_t seed = 0;
};

ExpansivityReport pexp_obstruction_estimate(const SystemModel& system, const Potential& potential, double eps,
                                            const PexpOptions& options);

enum class Verdict { pass, fail, indeterminate };
const char* to_string(Verdict v) noexcept;

struct CTConfig {
  double delta = 0.0, eps = 0.0, r = 0.1, a_param = 0.0;
  int split_index = 1;
  std::vector<long long> n_range{1, 2, 3, 4, 5};
  PressureOptions pressure;
  BowenPropertyConfig bowen;  // Q and alpha are taken from the potential
  bool bowen_from_system = true;  // C from the eigenbasis condition number, delta0 = eps
  int bowen_segments = 40;
  long long bowen_max_n = 40;
  BallSampling bowen_sampling;
  int spec_pairs = 100;
  long long spec_max_n = 20;
  PexpOptions pexp;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct CTReport {
  double delta = 0.0, eps = 0.0, r = 0.0, a_param = 0.0;
  bool scale_ok = false;  // eps > 2000 delta
  std::optional<PressureEstimate> pressure_all;
  std::optional<PressureEstimate> pressure_bad;
  bool bad_empty = false;
  bool trivial_decomposition = false;
  std::optional<BowenReport> bowen;
  double spec_success_rate = 0.0;
  long long spec_max_gap = 0, spec_predicted_gap = 0;
  std::optional<ExpansivityReport> expansivity;
  std::vector<std::string> notes;

  Verdict bad_pressure_verdict() const;
  Verdict bowen_verdict() const;
  Verdict specification_verdict() const;
  Verdict expansivity_verdict() const;
  /// Pass only when the scale flag holds and every hypothesis passes.
  bool all_pass() const;
};

/// Random segment with n in [1, max_n]; shift words get 32 symbols of room on
/// both sides, toy segments are clipped to the toy window.
Segment random_segment(const SystemModel& system, Rng& rng, long long max_n);

CTReport ct_report(const SystemModel& system, const Potential& potential, const CTConfig& config);

}  // namespace ctlab

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctlab/hyperbolicity.hpp"

namespace ctlab {

struct Segment {
  Point x;
  long long n = 0;
};

struct DecompTriple {
  long long p = 0, g = 0, s = 0;
  double r = 0.0;
  Segment segment;
};

/// Prefix-first split: p maximal with S_p beta1(x) >= -r p, then s <= n - p
/// maximal with S^-1_s beta2_hat(f^{n-1} x) >= -r s, and g = n - p - s.
DecompTriple decompose(const SystemModel& system, const CentralObservables& obs, const Point& x, long long n,
                       double r);

struct Membership {
  bool in_P = false, in_G = false, in_S = false;
};

/// Membership of (x, n) in P(r), G(r) and S(r). Backward sums in the G
/// condition are anchored at the segment end f^{n-1} x; S excludes P.
Membership classify(const SystemModel& system, const CentralObservables& obs, const Point& x, long long n,
                    double r);

/// Block checks for a decomposition: (x, p) in P, (f^p x, g) in G and the
/// inverse-time condition for the suffix (f^{p+g} x, s).
struct BlockCheck {
  bool prefix_in_P = false, middle_in_G = false, suffix_in_S = false;
  bool suffix_also_in_P = false;  // the set-difference convention would drop it from S
  bool ok() const { return prefix_in_P && middle_in_G && suffix_in_S; }
};

BlockCheck check_blocks(const SystemModel& system, const CentralObservables& obs, const DecompTriple& t);

struct PairSampling {
  int pairs = 4000;  // per rung, sampled models only
  int rungs = 40;    // ladder length below the top rung
  std::uint64_t seed = 0;
};

struct ContinuityCertificate {
  double eps_hat = 0.0;
  int rung = 0;  // 0 is the top rung (ambient diameter)
  long long pairs_tested = 0;
  bool exhaustive = false;         // toys scan every pair
  double worst_difference = 0.0;   // at the accepted rung
  /// Densest failing pair at the rung just above eps_hat, when one exists.
  std::optional<Point> failing_x, failing_y;
  double failing_distance = 0.0, failing_difference = 0.0;
};

/// Largest dyadic rung eps (from the ambient diameter down) such that every
/// tested pair with d(x, y) < eps has both observable differences <= r / 2.
ContinuityCertificate continuity_modulus(const SystemModel& system, const CentralObservables& obs, double r,
                                         const PairSampling& sampling = {});

struct ShrinkViolation {
  Segment segment;
  Point y;
};

struct ShrinkReport {
  long long segments = 0;
  long long samples = 0;
  long long violations = 0;
  long long not_in_G = 0;  // inputs failing the G(r) precondition, skipped
  std::vector<ShrinkViolation> examples;  // first few violations
};

/// For each segment in G(r) and sampled y in B_n(x, eps_hat), checks that
/// (y, n) is in G(r / 2).
ShrinkReport g_shrink_check(const SystemModel& system, const CentralObservables& obs,
                            const std::vector<Segment>& segments, double r, double eps_hat,
                            const BallSampling& sampling = {});

}  // namespace ctlab

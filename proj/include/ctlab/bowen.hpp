#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctlab/potentials.hpp"
#include "ctlab/systems.hpp"

namespace ctlab {

/// max_{0 <= i < n} d(f^i x, f^i y).
double bowen_distance(const SystemModel& system, const Point& x, const Point& y, long long n);

/// y in B_n(center, delta), i.e. bowen_distance < delta.
bool in_bowen_ball(const SystemModel& system, const Point& center, const Point& y, long long n,
                   double delta);

/// Candidate grid used for separated sets.
///
/// Shifts use every cylinder of length max(ceil(n + log2(1/delta)), n + memory - 1)
/// (or `word_length` when set). The circle uses an equally spaced lattice with
/// `oversample` points per Bowen-rescaled delta. Tori use a patch around
/// `center` spanned by the eigen-directions: each expanding direction gets
/// extent patch_cells * delta * |lambda|^-(reference_n - 1) sampled at
/// delta / oversample * |lambda|^-(n - 1); other directions get
/// `contracting_points` samples at spacing delta / oversample.
struct GridSpec {
  std::vector<double> center;
  int patch_cells = 4;
  int reference_n = 1;
  double oversample = 4.0;
  int contracting_points = 1;
  int word_length = 0;
  long long max_candidates = 6'000'000;
};

/// Default patch center on a d-torus: a fixed point with no rational relations.
std::vector<double> default_center(int dim);

struct CandidateGrid {
  std::vector<Point> points;
  std::string description;
  bool coarse = false;  // resolution not finer than delta / 2
};

/// `delta` is the finest separation scale the grid must resolve.
CandidateGrid make_grid(const SystemModel& system, long long n, double delta, const GridSpec& spec,
                        int memory = 1);

struct SeparatedSetCertificate {
  std::string grid;
  std::string ordering = "weight descending, ties lexicographic";
  std::string index;
  long long candidates = 0;
  long long distance_evaluations = 0;
  double max_cover_distance = 0.0;  // largest d_n from a rejected candidate to its blocker
  bool coarse_warning = false;
};

struct SeparatedSet {
  long long n = 0;
  double delta = 0.0;
  std::vector<Point> points;
  std::vector<double> log_weights;  // Phi used for ordering and summation
  std::vector<double> weights;      // exp(log_weights)
  /// For each candidate: index of the member it was admitted as or blocked by.
  std::vector<int> cover;
  SeparatedSetCertificate construction;

  double log_sum() const;
};

/// Weighted greedy (n, delta)-separated subset of the given candidates.
/// Candidates are processed by descending log-weight, ties broken by
/// lexicographic point order; a candidate is admitted iff its d_n distance to
/// every admitted member exceeds delta.
SeparatedSet greedy_separated(const SystemModel& system, const std::vector<Point>& candidates,
                              const std::vector<double>& log_weights, long long n, double delta);

SeparatedSet build_separated_set(const SystemModel& system, const Potential& potential, long long n,
                                 double delta, const GridSpec& grid, int workers = 1);

/// Brute-force check that members are pairwise (n, delta)-separated.
bool verify_separated(const SystemModel& system, const SeparatedSet& set);

struct BallSampling {
  int samples = 8;          // per dyadic rung
  int min_rung = 1;         // rungs 2^-min_rung ... 2^-max_rung
  int max_rung = 24;
  std::uint64_t seed = 0;
};

/// Points of B_n(x, radius) produced by fixed unit displacements scaled by
/// the dyadic rungs not exceeding `radius`. Every returned point is verified
/// to lie in the ball. Toy systems enumerate the ball exactly.
std::vector<Point> sample_bowen_ball(const SystemModel& system, const Point& x, long long n,
                                     double radius, const BallSampling& sampling);

/// Lower bound for sup over B_n(x, eps) of Phi_0; eps == 0 gives Phi_0(x, n).
double phi_eps(const SystemModel& system, const Potential& potential, const Point& x, long long n,
               double eps, const BallSampling& sampling);

}  // namespace ctlab

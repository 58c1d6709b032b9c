#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ctlab/systems.hpp"

namespace ctlab {

/// One term a * cos(2 pi <k, x> + phase) of a trigonometric potential.
struct TrigTerm {
  double a = 0.0;
  std::vector<long long> k;
  double phase = 0.0;
};

struct HolderCertificate {
  long long pairs = 0;
  double sampled_max_ratio = 0.0;  // max |dphi| / d^alpha over the sample
  double sampled_sup = 0.0;
  double sampled_inf = 0.0;
  bool ok = false;
};

enum class PotentialKind { zero, constant, trig, locally_constant, custom };

/// Real observable with a Hölder modulus and value bounds.
class Potential {
 public:
  using Evaluator = std::function<double(const Point&)>;

  static Potential zero();
  static Potential constant(double c);
  static Potential trig(std::vector<TrigTerm> terms);
  /// Depends on the first m symbols x_0..x_{m-1}; values are indexed by the
  /// base-k word with x_0 most significant.
  static Potential locally_constant(int k, int m, std::vector<double> values);
  static Potential custom(std::string name, Evaluator f, double Q, double alpha, double sup_bound,
                          double inf_bound);

  double operator()(const Point& p) const;

  PotentialKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  double holder_Q() const noexcept { return q_; }
  double holder_alpha() const noexcept { return alpha_; }
  double sup_bound() const noexcept { return sup_ + offset_; }
  double inf_bound() const noexcept { return inf_ + offset_; }
  double offset() const noexcept { return offset_; }

  /// Override the declared Hölder constant (validated by certify_holder).
  Potential with_holder(double Q, double alpha) const;
  /// phi + c.
  Potential shifted(double c) const;

  int lc_symbols() const noexcept { return lc_k_; }
  int lc_memory() const noexcept { return lc_m_; }
  const std::vector<double>& lc_values() const noexcept { return lc_values_; }
  const std::vector<TrigTerm>& trig_terms() const noexcept { return terms_; }

 private:
  PotentialKind kind_ = PotentialKind::zero;
  std::string name_ = "zero";
  double q_ = 0.0, alpha_ = 1.0, sup_ = 0.0, inf_ = 0.0, offset_ = 0.0;
  std::vector<TrigTerm> terms_;
  int lc_k_ = 0, lc_m_ = 0;
  std::vector<double> lc_values_;
  Evaluator custom_;
};

/// Samples pairs at dyadic separations and records the worst Hölder ratio.
/// Fails when it exceeds Q by more than 1%.
HolderCertificate certify_holder(const Potential& pot, const SystemModel& system,
                                 std::uint64_t seed, long long pairs = 10000);

using Observable = std::function<double(const Point&)>;

/// Sum of obs over x, f^{+-1} x, ..., f^{+-(n-1)} x.
double birkhoff_sum(const SystemModel& system, const Observable& obs, const Point& x, long long n,
                    Direction dir = Direction::forward);
double birkhoff_sum(const SystemModel& system, const Potential& pot, const Point& x, long long n,
                    Direction dir = Direction::forward);

/// S_0, S_1, ..., S_n along the orbit; entry k equals birkhoff_sum(.., k, ..)
/// bit for bit.
std::vector<double> birkhoff_prefix(const SystemModel& system, const Observable& obs,
                                    const Point& x, long long n,
                                    Direction dir = Direction::forward);

/// Evaluation grid for oscillation: resolution^d lattice on tori, every word
/// of length `word_length` (at least the potential's memory) on shifts, every
/// index on toys.
struct OscillationGrid {
  int resolution = 64;
  int word_length = 1;
};

std::pair<double, double> oscillation(const Potential& pot, const SystemModel& system,
                                      const OscillationGrid& grid);

}  // namespace ctlab

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ctlab/errors.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr int kMaxDim = 4;

enum class Direction { forward, backward };

/// Point of T^d (or the circle when dim == 1). Coordinate i is x[i] * 2^-128,
/// so every affine integer map acts exactly by wrapping integer arithmetic.
struct TorusPoint {
  std::array<u128, kMaxDim> x{};
  int dim = 0;
};

/// Finite window of a two-sided symbol sequence: sym[j] is the symbol at
/// index lo + j. Index 0 is the origin of the point.
struct ShiftPoint {
  int lo = 0;
  std::vector<std::uint8_t> sym;

  int hi() const noexcept { return lo + static_cast<int>(sym.size()); }
  bool covers(int i) const noexcept { return i >= lo && i < hi(); }
  std::uint8_t at(int i) const;
};

/// Orbit position in a CocycleToy; the map is i -> i + 1.
struct ToyPoint {
  long long index = 0;
};

using Point = std::variant<TorusPoint, ShiftPoint, ToyPoint>;

std::strong_ordering compare(const Point& a, const Point& b);
inline bool operator==(const TorusPoint& a, const TorusPoint& b) {
  return compare(Point(a), Point(b)) == 0;
}
inline bool operator==(const ShiftPoint& a, const ShiftPoint& b) {
  return a.lo == b.lo && a.sym == b.sym;
}
inline bool operator==(const ToyPoint& a, const ToyPoint& b) { return a.index == b.index; }

// Fixed-point conversions. Doubles are reduced mod 1 first.
u128 fixed_from_double(double x) noexcept;
double fixed_to_double(u128 x) noexcept;
/// Signed representative of x in [-1/2, 1/2) as a double.
double fixed_signed_to_double(u128 x) noexcept;

TorusPoint torus_point(std::span<const double> coords);
std::vector<double> coordinates(const TorusPoint& p);
/// p + w mod 1 for a real displacement w.
TorusPoint translate(const TorusPoint& p, std::span<const double> w);
/// Nearest-translate displacement q - p in [-1/2, 1/2)^d.
Eigen::VectorXd displacement(const TorusPoint& p, const TorusPoint& q);
/// Euclidean length of the nearest-translate displacement.
double torus_distance(const TorusPoint& p, const TorusPoint& q);

ShiftPoint shift_point(int lo, std::vector<std::uint8_t> symbols);

enum class SystemKind { full_shift, expanding_circle, toral_auto, cocycle_toy };

const char* to_string(SystemKind kind) noexcept;

struct Bundle {
  std::string label;
  Eigen::VectorXd direction;  // unit eigenvector
  double eigenvalue = 0.0;
  double log_rate = 0.0;      // log|eigenvalue|
};

struct ToySequence {
  std::vector<double> forward;
  std::vector<double> backward;
};

/// Immutable description of one model system.
class SystemModel {
 public:
  static SystemModel full_shift(int k);
  static SystemModel expanding_circle(int k);
  /// Hyperbolic toral automorphism. Labels default to s, c1..ck, u in order
  /// of increasing |eigenvalue|. `allow_neutral` admits an eigenvalue of
  /// modulus one (used only for non-hyperbolic control systems).
  static SystemModel toral(const std::vector<std::vector<long long>>& matrix,
                           std::optional<double> xi = std::nullopt,
                           std::vector<std::string> labels = {}, bool allow_neutral = false);
  /// Prescribed central log-norm sequences indexed by orbit position.
  static SystemModel cocycle_toy(std::map<std::string, ToySequence> sequences, double spacing = 1.0);

  SystemKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  int symbols() const noexcept { return k_; }
  int dim() const noexcept { return dim_; }
  bool invertible() const noexcept { return kind_ != SystemKind::expanding_circle; }
  bool has_splitting() const noexcept {
    return kind_ == SystemKind::toral_auto || kind_ == SystemKind::cocycle_toy;
  }
  /// True for the inverse of a shift or toy, where forward time reads the
  /// sequence leftwards.
  bool time_reversed() const noexcept { return reversed_; }
  std::optional<double> xi() const noexcept { return xi_; }
  double ambient_diameter() const noexcept { return diameter_; }

  // Linear data (toral and circle models).
  const std::vector<long long>& matrix() const noexcept { return a_; }
  const std::vector<long long>& inverse_matrix() const noexcept { return ainv_; }
  const std::vector<Bundle>& splitting() const noexcept { return bundles_; }
  const Bundle& bundle(const std::string& label) const;
  /// Columns are the splitting directions, in splitting order.
  const Eigen::MatrixXd& eigenbasis() const noexcept { return basis_; }
  const Eigen::MatrixXd& eigenbasis_inverse() const noexcept { return basis_inv_; }
  /// Operator 2-norm of the matrix.
  double matrix_norm() const noexcept { return norm_; }
  /// Largest Euclidean norm of a row of the inverse eigenbasis.
  double coordinate_gain() const noexcept { return gain_; }
  double condition_number() const noexcept { return cond_; }

  // Toy data.
  double spacing() const noexcept { return spacing_; }
  long long toy_length() const noexcept { return toy_len_; }
  std::vector<std::string> central_labels() const;

  /// The inverse system; the expanding circle has none.
  SystemModel inverse() const;

  Point step(const Point& p, Direction dir = Direction::forward) const;
  Point iterate(const Point& p, long long n) const;
  double distance(const Point& p, const Point& q) const;
  double bundle_log_norm(const Point& p, const std::string& label,
                         Direction dir = Direction::forward) const;
  /// Throws if p does not belong to this system.
  void validate(const Point& p) const;

 private:
  SystemKind kind_ = SystemKind::full_shift;
  std::string name_;
  int k_ = 0;
  int dim_ = 0;
  bool reversed_ = false;  // shift/toy read in reverse time
  bool neutral_ = false;
  std::optional<double> xi_;
  double diameter_ = 0.0;
  std::vector<long long> a_, ainv_;
  std::vector<Bundle> bundles_;
  Eigen::MatrixXd basis_, basis_inv_;
  double norm_ = 0.0, gain_ = 0.0, cond_ = 1.0;
  double spacing_ = 1.0;
  long long toy_len_ = 0;
  std::map<std::string, ToySequence> toy_;
};

/// Uniform random point. Shift points get the window [0, window).
Point random_point(const SystemModel& system, Rng& rng, int window = 64);

/// m * p mod 1 with m given row-major.
TorusPoint apply_matrix(const std::vector<long long>& m, int dim, const TorusPoint& p);

}  // namespace ctlab

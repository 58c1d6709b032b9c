#include "ctlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctlab {

std::uint8_t ShiftPoint::at(int i) const {
  if (!covers(i))
    throw Error(ErrorKind::insufficient_window,
                "index " + std::to_string(i) + " outside window [" + std::to_string(lo) + ", " +
                    std::to_string(hi()) + ")");
  return sym[static_cast<std::size_t>(i - lo)];
}

namespace {

std::strong_ordering cmp_u128(u128 a, u128 b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering compare(const Point& a, const Point& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  if (const auto* ta = std::get_if<TorusPoint>(&a)) {
    const auto& tb = std::get<TorusPoint>(b);
    if (auto c = ta->dim <=> tb.dim; c != 0) return c;
    for (int i = 0; i < ta->dim; ++i)
      if (auto c = cmp_u128(ta->x[i], tb.x[i]); c != 0) return c;
    return std::strong_ordering::equal;
  }
  if (const auto* sa = std::get_if<ShiftPoint>(&a)) {
    const auto& sb = std::get<ShiftPoint>(b);
    if (auto c = sa->lo <=> sb.lo; c != 0) return c;
    return std::lexicographical_compare_three_way(sa->sym.begin(), sa->sym.end(), sb.sym.begin(),
                                                  sb.sym.end());
  }
  return std::get<ToyPoint>(a).index <=> std::get<ToyPoint>(b).index;
}

u128 fixed_from_double(double x) noexcept {
  if (x < 0.0 && x > -1.0) return u128(0) - fixed_from_double(-x);
  double r = x - std::floor(x);
  if (!(r < 1.0)) r = 0.0;
  const double hi = std::ldexp(r, 64);
  const double hf = std::floor(hi);
  const auto h = hf >= 0x1p64 ? std::uint64_t{0} : static_cast<std::uint64_t>(hf);
  const auto l = static_cast<std::uint64_t>(std::ldexp(hi - hf, 64));
  return (u128(h) << 64) | u128(l);
}

double fixed_to_double(u128 x) noexcept {
  const double r = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(x >> 64)), -64) +
                   std::ldexp(static_cast<double>(static_cast<std::uint64_t>(x)), -128);
  return r < 1.0 ? r : 0.0;
}

double fixed_signed_to_double(u128 x) noexcept {
  return std::ldexp(static_cast<double>(static_cast<i128>(x)), -128);
}

TorusPoint torus_point(std::span<const double> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorKind::invalid_argument, "torus dimension must be in [1, 4]");
  TorusPoint p;
  p.dim = static_cast<int>(coords.size());
  for (int i = 0; i < p.dim; ++i) p.x[i] = fixed_from_double(coords[i]);
  return p;
}

std::vector<double> coordinates(const TorusPoint& p) {
  std::vector<double> out(static_cast<std::size_t>(p.dim));
  for (int i = 0; i < p.dim; ++i) out[i] = fixed_to_double(p.x[i]);
  return out;
}

TorusPoint translate(const TorusPoint& p, std::span<const double> w) {
  if (static_cast<int>(w.size()) != p.dim)
    throw Error(ErrorKind::invalid_argument, "displacement dimension mismatch");
  TorusPoint q = p;
  for (int i = 0; i < p.dim; ++i) q.x[i] += fixed_from_double(w[i]);
  return q;
}

Eigen::VectorXd displacement(const TorusPoint& p, const TorusPoint& q) {
  if (p.dim != q.dim) throw Error(ErrorKind::mismatched_variants, "torus dimension mismatch");
  Eigen::VectorXd d(p.dim);
  for (int i = 0; i < p.dim; ++i) d[i] = fixed_signed_to_double(q.x[i] - p.x[i]);
  return d;
}

double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  if (p.dim != q.dim) throw Error(ErrorKind::mismatched_variants, "torus dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    const double d = fixed_signed_to_double(q.x[i] - p.x[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

ShiftPoint shift_point(int lo, std::vector<std::uint8_t> symbols) {
  return ShiftPoint{lo, std::move(symbols)};
}

TorusPoint apply_matrix(const std::vector<long long>& m, int dim, const TorusPoint& p) {
  TorusPoint q;
  q.dim = dim;
  for (int i = 0; i < dim; ++i) {
    u128 acc = 0;
    for (int j = 0; j < dim; ++j)
      acc += static_cast<u128>(static_cast<i128>(m[static_cast<std::size_t>(i * dim + j)])) * p.x[j];
    q.x[i] = acc;
  }
  return q;
}

const char* to_string(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::full_shift: return "full_shift";
    case SystemKind::expanding_circle: return "expanding_circle";
    case SystemKind::toral_auto: return "toral_auto";
    case SystemKind::cocycle_toy: return "cocycle_toy";
  }
  return "unknown";
}

SystemModel SystemModel::full_shift(int k) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "full shift needs k >= 2");
  SystemModel s;
  s.kind_ = SystemKind::full_shift;
  s.name_ = "full_shift" + std::to_string(k);
  s.k_ = k;
  s.diameter_ = 0.5;
  return s;
}

SystemModel SystemModel::expanding_circle(int k) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "expanding circle needs degree >= 2");
  SystemModel s;
  s.kind_ = SystemKind::expanding_circle;
  s.name_ = "circle_x" + std::to_string(k);
  s.k_ = k;
  s.dim_ = 1;
  s.a_ = {k};
  s.diameter_ = 0.5;
  s.norm_ = k;
  s.gain_ = 1.0;
  s.basis_ = Eigen::MatrixXd::Identity(1, 1);
  s.basis_inv_ = s.basis_;
  return s;
}

SystemModel SystemModel::toral(const std::vector<std::vector<long long>>& matrix,
                               std::optional<double> xi, std::vector<std::string> labels,
                               bool allow_neutral) {
  const int d = static_cast<int>(matrix.size());
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_argument, "matrix size must be 2..4");
  Eigen::MatrixXd a(d, d);
  std::vector<long long> flat;
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(matrix[i].size()) != d)
      throw Error(ErrorKind::invalid_argument, "matrix must be square");
    for (int j = 0; j < d; ++j) {
      a(i, j) = static_cast<double>(matrix[i][j]);
      flat.push_back(matrix[i][j]);
    }
  }
  const double det = a.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-9)
    throw Error(ErrorKind::invalid_argument, "|det A| must be 1");

  Eigen::MatrixXd inv = a.inverse();
  std::vector<long long> iflat;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) iflat.push_back(std::llround(inv(i, j)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      long long acc = 0;
      for (int l = 0; l < d; ++l) acc += flat[i * d + l] * iflat[l * d + j];
      if (acc != (i == j ? 1 : 0))
        throw Error(ErrorKind::invalid_argument, "integer inverse check failed");
    }

  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::invalid_argument, "eigensolver failed");
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  for (int i = 0; i < d; ++i)
    if (std::abs(ev[i].imag()) > 1e-9)
      throw Error(ErrorKind::invalid_argument, "eigenvalues must be real");
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return std::abs(ev[i].real()) < std::abs(ev[j].real()); });

  SystemModel s;
  s.kind_ = SystemKind::toral_auto;
  s.dim_ = d;
  s.a_ = flat;
  s.ainv_ = iflat;
  s.diameter_ = 0.5 * std::sqrt(static_cast<double>(d));
  s.neutral_ = allow_neutral;
  s.basis_.resize(d, d);

  if (labels.empty()) {
    labels.push_back("s");
    for (int c = 1; c <= d - 2; ++c) labels.push_back("c" + std::to_string(c));
    labels.push_back("u");
  }
  if (static_cast<int>(labels.size()) != d)
    throw Error(ErrorKind::invalid_argument, "one label per eigen-direction required");

  for (int r = 0; r < d; ++r) {
    const int idx = order[static_cast<std::size_t>(r)];
    const double lam = ev[idx].real();
    Eigen::VectorXd v = es.eigenvectors().col(idx).real();
    v.normalize();
    for (int i = 0; i < d; ++i)
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0) v = -v;
        break;
      }
    if ((a * v - lam * v).norm() > 1e-10)
      throw Error(ErrorKind::invalid_argument, "eigenvector residual above 1e-10");
    if (r > 0 && std::abs(lam) - std::abs(s.bundles_.back().eigenvalue) < 1e-9)
      throw Error(ErrorKind::invalid_argument, "eigenvalue moduli must be distinct");
    if (!allow_neutral && std::abs(std::abs(lam) - 1.0) < 1e-9)
      throw Error(ErrorKind::invalid_argument, "eigenvalue on the unit circle");
    s.bundles_.push_back({labels[r], v, lam, std::log(std::abs(lam))});
    s.basis_.col(r) = v;
  }
  if (!(s.bundles_.front().log_rate < 0 && s.bundles_.back().log_rate > 0))
    throw Error(ErrorKind::invalid_argument, "need a contracting and an expanding direction");

  s.basis_inv_ = s.basis_.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_a(a);
  s.norm_ = svd_a.singularValues()(0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_p(s.basis_);
  s.cond_ = svd_p.singularValues()(0) / svd_p.singularValues()(d - 1);
  s.gain_ = 0.0;
  for (int i = 0; i < d; ++i) s.gain_ = std::max(s.gain_, s.basis_inv_.row(i).norm());

  const double strong = std::max(std::abs(s.bundles_.front().eigenvalue),
                                 1.0 / std::abs(s.bundles_.back().eigenvalue));
  if (xi) {
    if (!(*xi >= strong && *xi < 1.0))
      throw Error(ErrorKind::invalid_argument, "xi must dominate the strong bundles and be < 1");
    s.xi_ = xi;
  } else {
    s.xi_ = 0.5 * (strong + 1.0);
  }
  s.name_ = "toral" + std::to_string(d);
  return s;
}

SystemModel SystemModel::cocycle_toy(std::map<std::string, ToySequence> sequences, double spacing) {
  if (sequences.empty()) throw Error(ErrorKind::invalid_argument, "toy needs sequences");
  if (!(spacing > 0)) throw Error(ErrorKind::invalid_argument, "spacing must be positive");
  SystemModel s;
  s.kind_ = SystemKind::cocycle_toy;
  s.name_ = "cocycle_toy";
  s.spacing_ = spacing;
  s.toy_len_ = -1;
  for (auto& [label, seq] : sequences) {
    if (seq.backward.empty()) {
      seq.backward.resize(seq.forward.size());
      std::transform(seq.forward.begin(), seq.forward.end(), seq.backward.begin(),
                     [](double v) { return -v; });
    } else if (seq.forward.empty()) {
      seq.forward.resize(seq.backward.size());
      std::transform(seq.backward.begin(), seq.backward.end(), seq.forward.begin(),
                     [](double v) { return -v; });
    }
    if (seq.backward.size() != seq.forward.size())
      throw Error(ErrorKind::invalid_argument, "forward/backward length mismatch");
    const auto len = static_cast<long long>(seq.forward.size());
    if (s.toy_len_ >= 0 && len != s.toy_len_)
      throw Error(ErrorKind::invalid_argument, "toy sequences must share one length");
    s.toy_len_ = len;
  }
  if (s.toy_len_ <= 0) throw Error(ErrorKind::invalid_argument, "toy sequences are empty");
  s.toy_ = std::move(sequences);
  s.diameter_ = spacing * static_cast<double>(s.toy_len_ - 1);
  return s;
}

const Bundle& SystemModel::bundle(const std::string& label) const {
  if (kind_ != SystemKind::toral_auto)
    throw Error(ErrorKind::no_smooth_structure, std::string(to_string(kind_)) + " has no splitting");
  for (const auto& b : bundles_)
    if (b.label == label) return b;
  throw Error(ErrorKind::unknown_label, label);
}

std::vector<std::string> SystemModel::central_labels() const {
  std::vector<std::pair<int, std::string>> found;
  auto consider = [&](const std::string& l) {
    if (l.size() >= 2 && l[0] == 'c' && std::all_of(l.begin() + 1, l.end(), ::isdigit))
      found.emplace_back(std::stoi(l.substr(1)), l);
  };
  if (kind_ == SystemKind::toral_auto)
    for (const auto& b : bundles_) consider(b.label);
  else if (kind_ == SystemKind::cocycle_toy)
    for (const auto& [l, _] : toy_) consider(l);
  else
    throw Error(ErrorKind::no_smooth_structure, std::string(to_string(kind_)) + " has no splitting");
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

SystemModel SystemModel::inverse() const {
  switch (kind_) {
    case SystemKind::expanding_circle:
      throw Error(ErrorKind::unsupported_direction, "expanding circle is not invertible");
    case SystemKind::toral_auto: {
      std::vector<std::vector<long long>> m(static_cast<std::size_t>(dim_));
      for (int i = 0; i < dim_; ++i)
        m[i].assign(ainv_.begin() + i * dim_, ainv_.begin() + (i + 1) * dim_);
      SystemModel inv = toral(m, xi_, {}, neutral_);
      inv.name_ = name_ + "^-1";
      return inv;
    }
    case SystemKind::full_shift:
    case SystemKind::cocycle_toy: {
      SystemModel inv = *this;
      inv.reversed_ = !reversed_;
      for (auto& [_, seq] : inv.toy_) std::swap(seq.forward, seq.backward);
      inv.name_ = name_ + "^-1";
      return inv;
    }
  }
  return *this;
}

void SystemModel::validate(const Point& p) const {
  switch (kind_) {
    case SystemKind::full_shift: {
      const auto* s = std::get_if<ShiftPoint>(&p);
      if (!s) throw Error(ErrorKind::mismatched_variants, "expected a shift point");
      for (auto c : s->sym)
        if (c >= k_) throw Error(ErrorKind::invalid_argument, "symbol out of alphabet");
      return;
    }
    case SystemKind::expanding_circle:
    case SystemKind::toral_auto: {
      const auto* t = std::get_if<TorusPoint>(&p);
      if (!t || t->dim != dim_) throw Error(ErrorKind::mismatched_variants, "expected a torus point");
      return;
    }
    case SystemKind::cocycle_toy:
      if (!std::holds_alternative<ToyPoint>(p))
        throw Error(ErrorKind::mismatched_variants, "expected a toy point");
      return;
  }
}

Point SystemModel::step(const Point& p, Direction dir) const {
  validate(p);
  const bool fwd = (dir == Direction::forward) != reversed_;
  switch (kind_) {
    case SystemKind::full_shift: {
      ShiftPoint s = std::get<ShiftPoint>(p);
      s.lo += fwd ? -1 : 1;
      return s;
    }
    case SystemKind::expanding_circle:
      if (!fwd) throw Error(ErrorKind::unsupported_direction, "expanding circle has no inverse step");
      return apply_matrix(a_, 1, std::get<TorusPoint>(p));
    case SystemKind::toral_auto:
      return apply_matrix(fwd ? a_ : ainv_, dim_, std::get<TorusPoint>(p));
    case SystemKind::cocycle_toy:
      return ToyPoint{std::get<ToyPoint>(p).index + (fwd ? 1 : -1)};
  }
  return p;
}

Point SystemModel::iterate(const Point& p, long long n) const {
  validate(p);
  const bool fwd = (n >= 0) != reversed_;
  const long long steps = n >= 0 ? n : -n;
  switch (kind_) {
    case SystemKind::full_shift: {
      ShiftPoint s = std::get<ShiftPoint>(p);
      s.lo += static_cast<int>(fwd ? -steps : steps);
      return s;
    }
    case SystemKind::cocycle_toy:
      return ToyPoint{std::get<ToyPoint>(p).index + (fwd ? steps : -steps)};
    default: {
      if (!fwd && kind_ == SystemKind::expanding_circle)
        throw Error(ErrorKind::unsupported_direction, "expanding circle has no inverse step");
      TorusPoint t = std::get<TorusPoint>(p);
      const auto& m = fwd ? a_ : ainv_;
      for (long long i = 0; i < steps; ++i) t = apply_matrix(m, dim_, t);
      return t;
    }
  }
}

double SystemModel::distance(const Point& p, const Point& q) const {
  if (p.index() != q.index()) throw Error(ErrorKind::mismatched_variants, "points of different kinds");
  validate(p);
  validate(q);
  switch (kind_) {
    case SystemKind::full_shift: {
      const auto& a = std::get<ShiftPoint>(p);
      const auto& b = std::get<ShiftPoint>(q);
      const int lo = std::max(a.lo, b.lo), hi = std::min(a.hi(), b.hi());
      if (!(lo <= 0 && 0 < hi))
        throw Error(ErrorKind::insufficient_window, "windows do not share the origin");
      const int reach = std::max(-lo, hi - 1);
      for (int m = 0; m <= reach; ++m) {
        if (m < hi && a.at(m) != b.at(m)) return std::ldexp(1.0, -(m + 1));
        if (m > 0 && -m >= lo && a.at(-m) != b.at(-m)) return std::ldexp(1.0, -(m + 1));
      }
      return 0.0;
    }
    case SystemKind::expanding_circle:
    case SystemKind::toral_auto:
      return torus_distance(std::get<TorusPoint>(p), std::get<TorusPoint>(q));
    case SystemKind::cocycle_toy:
      return spacing_ * static_cast<double>(std::llabs(std::get<ToyPoint>(p).index -
                                                      std::get<ToyPoint>(q).index));
  }
  return 0.0;
}

double SystemModel::bundle_log_norm(const Point& p, const std::string& label, Direction dir) const {
  validate(p);
  if (kind_ == SystemKind::toral_auto) {
    const double rate = bundle(label).log_rate;
    return dir == Direction::forward ? rate : -rate;
  }
  if (kind_ == SystemKind::cocycle_toy) {
    auto it = toy_.find(label);
    if (it == toy_.end()) throw Error(ErrorKind::unknown_label, label);
    const long long i = std::get<ToyPoint>(p).index;
    if (i < 0 || i >= toy_len_)
      throw Error(ErrorKind::insufficient_window, "toy index " + std::to_string(i) + " out of range");
    const auto& seq = dir == Direction::forward ? it->second.forward : it->second.backward;
    return seq[static_cast<std::size_t>(i)];
  }
  throw Error(ErrorKind::no_smooth_structure, std::string(to_string(kind_)) + " has no splitting");
}

Point random_point(const SystemModel& system, Rng& rng, int window) {
  switch (system.kind()) {
    case SystemKind::full_shift: {
      std::vector<std::uint8_t> sym(static_cast<std::size_t>(window));
      for (auto& c : sym) c = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(system.symbols())));
      return ShiftPoint{0, std::move(sym)};
    }
    case SystemKind::expanding_circle:
    case SystemKind::toral_auto: {
      TorusPoint p;
      p.dim = system.dim();
      for (int i = 0; i < p.dim; ++i) p.x[i] = (u128(rng.next_u64()) << 64) | u128(rng.next_u64());
      return p;
    }
    case SystemKind::cocycle_toy:
      return ToyPoint{static_cast<long long>(rng.below(static_cast<std::uint64_t>(system.toy_length())))};
  }
  return ToyPoint{};
}

}  // namespace ctlab

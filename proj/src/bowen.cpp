#include "ctlab/bowen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "ctlab/numeric.hpp"
#include "ctlab/parallel.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

namespace {

// d_n on shift windows: the worst time i sees the disagreement nearest to
// [0, n - 1], so d_n = 2^-(m + 1) with m that gap.
double shift_bowen_distance(const ShiftPoint& a, const ShiftPoint& b, long long n) {
  const int lo = std::max(a.lo, b.lo), hi = std::min(a.hi(), b.hi());
  if (!(lo <= 0 && n - 1 < hi))
    throw Error(ErrorKind::insufficient_window, "window does not cover the first n positions");
  long long best = -1;
  for (int t = lo; t < hi; ++t) {
    if (a.sym[static_cast<std::size_t>(t - a.lo)] == b.sym[static_cast<std::size_t>(t - b.lo)]) continue;
    const long long gap = t < 0 ? -t : (t >= n ? t - (n - 1) : 0);
    if (best < 0 || gap < best) best = gap;
    if (best == 0) break;
  }
  return best < 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(best + 1));
}

std::vector<TorusPoint> torus_orbit(const SystemModel& system, const TorusPoint& x, long long n) {
  std::vector<TorusPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(n));
  orbit.push_back(x);
  for (long long i = 1; i < n; ++i) orbit.push_back(apply_matrix(system.matrix(), system.dim(), orbit.back()));
  return orbit;
}

// Returns d_n, stopping early once it exceeds `stop`.
double orbit_distance(const std::vector<TorusPoint>& a, const std::vector<TorusPoint>& b, double stop) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, torus_distance(a[i], b[i]));
    if (d > stop) break;
  }
  return d;
}

int shift_radius(double delta) {
  // Smallest R with 2^-(R + 1) <= delta.
  int r = 0;
  while (std::ldexp(1.0, -(r + 1)) > delta) ++r;
  return r;
}

struct CellKey {
  std::array<long long, kMaxDim> c{};
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : k.c) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

enum class IndexMode { brute, shift_key, circle_cells, eigen_cells };

}  // namespace

double bowen_distance(const SystemModel& system, const Point& x, const Point& y, long long n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "Bowen distance needs n >= 1");
  if (x.index() != y.index()) throw Error(ErrorKind::mismatched_variants, "points of different kinds");
  system.validate(x);
  system.validate(y);
  switch (system.kind()) {
    case SystemKind::full_shift: {
      // Forward time on the inverse shift reads the sequence leftwards.
      const auto& a = std::get<ShiftPoint>(x);
      const auto& b = std::get<ShiftPoint>(y);
      if (!system.time_reversed()) return shift_bowen_distance(a, b, n);
      auto mirror = [](const ShiftPoint& s) {
        ShiftPoint m;
        m.lo = -(s.hi() - 1);
        m.sym.assign(s.sym.rbegin(), s.sym.rend());
        return m;
      };
      return shift_bowen_distance(mirror(a), mirror(b), n);
    }
    case SystemKind::cocycle_toy:
      return system.distance(x, y);
    default: {
      TorusPoint a = std::get<TorusPoint>(x), b = std::get<TorusPoint>(y);
      double d = 0.0;
      for (long long i = 0; i < n; ++i) {
        d = std::max(d, torus_distance(a, b));
        if (i + 1 < n) {
          a = std::get<TorusPoint>(system.step(a));
          b = std::get<TorusPoint>(system.step(b));
        }
      }
      return d;
    }
  }
}

bool in_bowen_ball(const SystemModel& system, const Point& center, const Point& y, long long n,
                   double delta) {
  return bowen_distance(system, center, y, n) < delta;
}

std::vector<double> default_center(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim));
  const double golden = 0.6180339887498949;
  for (int i = 0; i < dim; ++i) {
    const double v = 0.2113248654051871 + golden * (i + 1) + 0.1 * std::sqrt(2.0) * i;
    c[static_cast<std::size_t>(i)] = v - std::floor(v);
  }
  return c;
}

CandidateGrid make_grid(const SystemModel& system, long long n, double delta, const GridSpec& spec,
                        int memory) {
  if (n < 1 || !(delta > 0)) throw Error(ErrorKind::invalid_argument, "grid needs n >= 1, delta > 0");
  CandidateGrid grid;
  switch (system.kind()) {
    case SystemKind::full_shift: {
      const long long auto_len = std::max<long long>(
          static_cast<long long>(std::ceil(static_cast<double>(n) + std::log2(1.0 / delta) - 1e-12)),
          n + memory - 1);
      const long long len = spec.word_length > 0 ? spec.word_length : std::max<long long>(auto_len, n);
      const double count = std::pow(static_cast<double>(system.symbols()), static_cast<double>(len));
      if (count > static_cast<double>(spec.max_candidates))
        throw Error(ErrorKind::invalid_argument,
                    "cylinder grid of length " + std::to_string(len) + " exceeds max_candidates");
      const auto total = static_cast<long long>(count);
      grid.points.reserve(static_cast<std::size_t>(total));
      std::vector<std::uint8_t> word(static_cast<std::size_t>(len), 0);
      for (long long c = 0; c < total; ++c) {
        grid.points.push_back(ShiftPoint{0, word});
        for (long long i = len - 1; i >= 0; --i) {
          auto& s = word[static_cast<std::size_t>(i)];
          if (++s < system.symbols()) break;
          s = 0;
        }
      }
      grid.description = "cylinders of length " + std::to_string(len);
      break;
    }
    case SystemKind::expanding_circle: {
      const double count = std::ceil(std::pow(static_cast<double>(system.symbols()), static_cast<double>(n - 1)) *
                                     spec.oversample / delta);
      if (count > static_cast<double>(spec.max_candidates))
        throw Error(ErrorKind::invalid_argument, "circle grid exceeds max_candidates");
      const auto m = static_cast<long long>(count);
      const u128 step = (~u128(0)) / static_cast<u128>(m);
      grid.points.reserve(static_cast<std::size_t>(m));
      for (long long i = 0; i < m; ++i) {
        TorusPoint p;
        p.dim = 1;
        p.x[0] = step * static_cast<u128>(i);
        grid.points.push_back(p);
      }
      grid.description = "circle lattice of " + std::to_string(m) + " points";
      grid.coarse = spec.oversample < 2.0;
      break;
    }
    case SystemKind::toral_auto: {
      const int d = system.dim();
      std::vector<double> center = spec.center.empty() ? default_center(d) : spec.center;
      if (static_cast<int>(center.size()) != d)
        throw Error(ErrorKind::invalid_argument, "grid center dimension mismatch");
      const TorusPoint c = torus_point(center);
      std::vector<std::vector<double>> offsets(static_cast<std::size_t>(d));
      double total = 1.0;
      for (int j = 0; j < d; ++j) {
        const double rate = system.splitting()[j].log_rate;
        double h, extent;
        long long count;
        if (rate > 0) {
          extent = spec.patch_cells * delta * std::exp(-(spec.reference_n - 1) * rate);
          h = delta / spec.oversample * std::exp(-static_cast<double>(n - 1) * rate);
          count = static_cast<long long>(std::floor(extent / h + 1e-9)) + 1;
        } else {
          h = delta / spec.oversample;
          count = std::max(1, spec.contracting_points);
        }
        total *= static_cast<double>(count);
        if (total > static_cast<double>(spec.max_candidates))
          throw Error(ErrorKind::invalid_argument, "torus patch exceeds max_candidates");
        for (long long i = 0; i < count; ++i)
          offsets[j].push_back((static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * h);
      }
      std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
      grid.points.reserve(static_cast<std::size_t>(total));
      std::vector<double> w(static_cast<std::size_t>(d));
      for (;;) {
        Eigen::VectorXd disp = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < d; ++j) disp += offsets[j][idx[j]] * system.splitting()[j].direction;
        for (int i = 0; i < d; ++i) w[i] = disp[i];
        grid.points.push_back(translate(c, w));
        int j = d - 1;
        while (j >= 0 && idx[j] + 1 == offsets[j].size()) idx[j--] = 0;
        if (j < 0) break;
        ++idx[j];
      }
      grid.description = "eigen-aligned patch of " + std::to_string(grid.points.size()) + " points";
      grid.coarse = spec.oversample < 2.0;
      break;
    }
    case SystemKind::cocycle_toy:
      for (long long i = 0; i + n <= system.toy_length(); ++i) grid.points.push_back(ToyPoint{i});
      grid.description = "toy indices";
      break;
  }
  if (grid.points.empty()) throw Error(ErrorKind::empty_grid, "grid has no candidates");
  return grid;
}

double SeparatedSet::log_sum() const { return log_sum_exp(log_weights); }

SeparatedSet greedy_separated(const SystemModel& system, const std::vector<Point>& candidates,
                              const std::vector<double>& log_weights, long long n, double delta) {
  if (candidates.empty()) throw Error(ErrorKind::empty_grid, "no candidates");
  if (candidates.size() != log_weights.size())
    throw Error(ErrorKind::invalid_argument, "one weight per candidate required");
  if (n < 1 || !(delta > 0)) throw Error(ErrorKind::invalid_argument, "need n >= 1 and delta > 0");

  SeparatedSet out;
  out.n = n;
  out.delta = delta;
  out.construction.candidates = static_cast<long long>(candidates.size());
  out.cover.assign(candidates.size(), -1);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (log_weights[i] != log_weights[j]) return log_weights[i] > log_weights[j];
    return compare(candidates[i], candidates[j]) < 0;
  });

  // Pick a conservative neighbour index: any pair with d_n <= delta lands in
  // the same or adjacent buckets.
  IndexMode mode = IndexMode::brute;
  int key_len = 0;
  std::vector<double> tol;
  TorusPoint center;
  long long cells = 0;
  const bool forward_shift = system.kind() == SystemKind::full_shift && !system.time_reversed();
  if (forward_shift) {
    const auto& f = std::get<ShiftPoint>(candidates.front());
    const bool uniform = std::all_of(candidates.begin(), candidates.end(), [&](const Point& p) {
      const auto& s = std::get<ShiftPoint>(p);
      return s.lo == 0 && s.sym.size() == f.sym.size();
    });
    if (uniform && f.lo == 0 && static_cast<long long>(f.sym.size()) >= n) {
      const int r = shift_radius(delta);
      key_len = r == 0 ? 0 : static_cast<int>(std::min<long long>(static_cast<long long>(f.sym.size()), n + r - 1));
      mode = IndexMode::shift_key;
    }
  } else if (system.kind() == SystemKind::expanding_circle) {
    const double k = system.symbols();
    if (delta * (k + 1) < 1) {
      const double t = delta * std::pow(k, -static_cast<double>(n - 1)) * (1 + 1e-9) + 1e-30;
      cells = static_cast<long long>(std::floor(1.0 / t));
      if (cells >= 3 && t > 1e-12) {
        mode = IndexMode::circle_cells;
        tol = {1.0 / static_cast<double>(cells)};
      }
    }
  } else if (system.kind() == SystemKind::toral_auto) {
    const int d = system.dim();
    center = std::get<TorusPoint>(candidates.front());
    double radius = 0.0;
    for (const auto& p : candidates)
      radius = std::max(radius, torus_distance(center, std::get<TorusPoint>(p)));
    if (delta * (system.matrix_norm() + 1) < 1 && 2 * radius + delta < 0.5) {
      tol.resize(static_cast<std::size_t>(d));
      bool ok = true;
      for (int j = 0; j < d; ++j) {
        const double rate = system.splitting()[j].log_rate;
        double t = system.coordinate_gain() * delta * (rate > 0 ? std::exp(-static_cast<double>(n - 1) * rate) : 1.0);
        t = t * (1 + 1e-9) + 1e-15;
        tol[j] = t;
        if (t < 1e-11) ok = false;
      }
      if (ok) mode = IndexMode::eigen_cells;
    }
  }

  const char* mode_name[] = {"brute force", "ultrametric cylinder key", "periodic cells",
                             "eigen-coordinate cells"};
  out.construction.index = mode_name[static_cast<int>(mode)];

  std::unordered_map<std::string, int> shift_index;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cell_index;
  std::vector<std::vector<TorusPoint>> member_orbits;
  const bool torus_like = system.kind() == SystemKind::toral_auto || system.kind() == SystemKind::expanding_circle;

  auto cell_of = [&](const Point& p) {
    CellKey key;
    const auto& t = std::get<TorusPoint>(p);
    if (mode == IndexMode::circle_cells) {
      key.c[0] = static_cast<long long>(std::floor(fixed_to_double(t.x[0]) * static_cast<double>(cells)));
      if (key.c[0] >= cells) key.c[0] = cells - 1;
    } else {
      const Eigen::VectorXd u = system.eigenbasis_inverse() * displacement(center, t);
      for (int j = 0; j < system.dim(); ++j) key.c[j] = static_cast<long long>(std::floor(u[j] / tol[j]));
    }
    return key;
  };

  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t ci = order[oi];
    const Point& p = candidates[ci];
    int blocker = -1;
    double block_d = 0.0;

    std::vector<TorusPoint> orbit;
    if (torus_like) orbit = torus_orbit(system, std::get<TorusPoint>(p), n);
    auto test = [&](int m) {
      ++out.construction.distance_evaluations;
      const double d = torus_like ? orbit_distance(orbit, member_orbits[static_cast<std::size_t>(m)], delta)
                                  : bowen_distance(system, p, out.points[static_cast<std::size_t>(m)], n);
      if (d <= delta) {
        blocker = m;
        block_d = d;
        return true;
      }
      return false;
    };

    std::string skey;
    CellKey ckey;
    switch (mode) {
      case IndexMode::brute:
        for (int m = 0; m < static_cast<int>(out.points.size()); ++m)
          if (test(m)) break;
        break;
      case IndexMode::shift_key: {
        const auto& s = std::get<ShiftPoint>(p).sym;
        skey.assign(s.begin(), s.begin() + key_len);
        auto it = shift_index.find(skey);
        if (it != shift_index.end()) test(it->second);
        break;
      }
      case IndexMode::circle_cells: {
        ckey = cell_of(p);
        for (long long dc = -1; dc <= 1 && blocker < 0; ++dc) {
          CellKey q;
          q.c[0] = ((ckey.c[0] + dc) % cells + cells) % cells;
          auto it = cell_index.find(q);
          if (it == cell_index.end()) continue;
          for (int m : it->second)
            if (test(m)) break;
        }
        break;
      }
      case IndexMode::eigen_cells: {
        ckey = cell_of(p);
        const int d = system.dim();
        int combos = 1;
        for (int j = 0; j < d; ++j) combos *= 3;
        for (int c = 0; c < combos && blocker < 0; ++c) {
          CellKey q = ckey;
          int r = c;
          for (int j = 0; j < d; ++j) {
            q.c[j] += r % 3 - 1;
            r /= 3;
          }
          auto it = cell_index.find(q);
          if (it == cell_index.end()) continue;
          for (int m : it->second)
            if (test(m)) break;
        }
        break;
      }
    }

    if (blocker >= 0) {
      out.cover[ci] = blocker;
      out.construction.max_cover_distance = std::max(out.construction.max_cover_distance, block_d);
      continue;
    }
    const int id = static_cast<int>(out.points.size());
    out.cover[ci] = id;
    out.points.push_back(p);
    out.log_weights.push_back(log_weights[ci]);
    if (torus_like) member_orbits.push_back(std::move(orbit));
    if (mode == IndexMode::shift_key) shift_index.emplace(std::move(skey), id);
    if (mode == IndexMode::circle_cells || mode == IndexMode::eigen_cells) cell_index[ckey].push_back(id);
  }
  out.weights.reserve(out.log_weights.size());
  for (double lw : out.log_weights) out.weights.push_back(std::exp(lw));
  return out;
}

SeparatedSet build_separated_set(const SystemModel& system, const Potential& potential, long long n,
                                 double delta, const GridSpec& grid_spec, int workers) {
  const CandidateGrid grid = make_grid(system, n, 0.5 * delta, grid_spec, std::max(1, potential.lc_memory()));
  std::vector<double> lw(grid.points.size());
  parallel_for(grid.points.size(), workers,
               [&](std::size_t i) { lw[i] = birkhoff_sum(system, potential, grid.points[i], n); });
  SeparatedSet set = greedy_separated(system, grid.points, lw, n, delta);
  set.construction.grid = grid.description;
  set.construction.coarse_warning = grid.coarse;
  return set;
}

bool verify_separated(const SystemModel& system, const SeparatedSet& set) {
  for (std::size_t i = 0; i < set.points.size(); ++i)
    for (std::size_t j = i + 1; j < set.points.size(); ++j)
      if (!(bowen_distance(system, set.points[i], set.points[j], set.n) > set.delta)) return false;
  return true;
}

std::vector<Point> sample_bowen_ball(const SystemModel& system, const Point& x, long long n,
                                     double radius, const BallSampling& sampling) {
  std::vector<Point> out;
  if (!(radius > 0)) return out;
  switch (system.kind()) {
    case SystemKind::cocycle_toy: {
      const long long c = std::get<ToyPoint>(x).index;
      const auto reach = static_cast<long long>(std::ceil(radius / system.spacing()));
      for (long long t = -reach; t <= reach; ++t) {
        const long long y = c + t;
        if (y < 0 || y + n > system.toy_length()) continue;
        if (system.spacing() * static_cast<double>(std::llabs(t)) < radius) out.push_back(ToyPoint{y});
      }
      return out;
    }
    case SystemKind::full_shift: {
      const auto& s = std::get<ShiftPoint>(x);
      const bool fwd = !system.time_reversed();
      // The radius itself comes first: the metric takes only dyadic values,
      // so a radius between rungs admits one more layer than the rung below.
      std::vector<double> rhos{radius};
      for (int rung = sampling.min_rung; rung <= sampling.max_rung; ++rung)
        if (std::ldexp(1.0, -rung) < radius) rhos.push_back(std::ldexp(1.0, -rung));
      for (const double rho : rhos) {
        int r = 0;  // smallest R with 2^-(R + 1) < rho
        while (!(std::ldexp(1.0, -(r + 1)) < rho)) ++r;
        for (int t = 0; t < sampling.samples; ++t) {
          Rng rng(sampling.seed, 0xba11, static_cast<std::uint64_t>(t));
          ShiftPoint y = s;
          for (int i = s.lo; i < s.hi(); ++i) {
            const auto v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(system.symbols())));
            const long long pos = fwd ? i : -i;  // time runs the other way on the inverse
            if (pos >= n + r - 1 || pos <= -r) y.sym[static_cast<std::size_t>(i - s.lo)] = v;
          }
          if (in_bowen_ball(system, x, y, n, radius)) out.push_back(std::move(y));
        }
      }
      return out;
    }
    default: {
      const auto& t0 = std::get<TorusPoint>(x);
      const int d = t0.dim;
      for (int rung = sampling.min_rung; rung <= sampling.max_rung; ++rung) {
        const double rho = std::ldexp(1.0, -rung);
        if (rho > radius) continue;
        for (int t = 0; t < sampling.samples; ++t) {
          Rng rng(sampling.seed, 0xba11, static_cast<std::uint64_t>(t));
          Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
          if (system.kind() == SystemKind::expanding_circle) {
            w[0] = rho * rng.uniform(-1.0, 1.0) *
                   std::pow(static_cast<double>(system.symbols()), -static_cast<double>(n - 1));
          } else {
            for (int j = 0; j < d; ++j) {
              const double rate = system.splitting()[j].log_rate;
              const double scale = rate > 0 ? std::exp(-static_cast<double>(n - 1) * rate) : 1.0;
              w += rho / d * rng.uniform(-1.0, 1.0) * scale * system.splitting()[j].direction;
            }
          }
          std::vector<double> wv(w.data(), w.data() + d);
          Point y = translate(t0, wv);
          if (in_bowen_ball(system, x, y, n, radius)) out.push_back(std::move(y));
        }
      }
      return out;
    }
  }
}

double phi_eps(const SystemModel& system, const Potential& potential, const Point& x, long long n,
               double eps, const BallSampling& sampling) {
  if (eps < 0) throw Error(ErrorKind::invalid_argument, "eps must be non-negative");
  double best = birkhoff_sum(system, potential, x, n);
  if (eps == 0 || n < 1 || potential.sup_bound() == potential.inf_bound()) return best;
  if (system.kind() == SystemKind::full_shift && !system.time_reversed() &&
      potential.kind() == PotentialKind::locally_constant) {
    // Exact: the ball pins positions -R+1 .. n+R-2 (R least with
    // 2^-(R+1) < eps) and the sum reads positions 0 .. n+m-2.
    const auto& s = std::get<ShiftPoint>(x);
    int r = 0;
    while (!(std::ldexp(1.0, -(r + 1)) < eps)) ++r;
    const long long last = n + potential.lc_memory() - 2;
    const long long first_free = r == 0 ? 0 : n + r - 1;
    const long long free = std::max<long long>(0, last - first_free + 1);
    if (s.covers(0) && s.covers(static_cast<int>(last)) && free <= 12) {
      const int k = system.symbols();
      ShiftPoint y = s;
      const auto combos = static_cast<long long>(std::llround(std::pow(k, static_cast<double>(free))));
      for (long long c = 0; c < combos; ++c) {
        long long v = c;
        for (long long i = first_free; i <= last; ++i) {
          y.sym[static_cast<std::size_t>(i - s.lo)] = static_cast<std::uint8_t>(v % k);
          v /= k;
        }
        best = std::max(best, birkhoff_sum(system, potential, y, n));
      }
      return best;
    }
  }
  for (const auto& y : sample_bowen_ball(system, x, n, eps, sampling))
    best = std::max(best, birkhoff_sum(system, potential, y, n));
  return best;
}

}  // namespace ctlab

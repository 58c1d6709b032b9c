#include "ctlab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctlab/parallel.hpp"

namespace ctlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double slope_of(const std::vector<long long>& ns, const std::vector<double>& ys, std::size_t from) {
  std::vector<double> x, y;
  for (std::size_t i = from; i < ns.size(); ++i) {
    x.push_back(static_cast<double>(ns[i]));
    y.push_back(ys[i]);
  }
  return least_squares_slope(x, y);
}

}  // namespace

PartitionValue partition_function(const SystemModel& system, const Potential& potential,
                                  const SegmentFilter& filter, long long n, double delta, double eps,
                                  const PressureOptions& options) {
  if (!(delta > 0) || n < 1) throw Error(ErrorKind::invalid_argument, "need delta > 0 and n >= 1");
  if (eps < 0) throw Error(ErrorKind::invalid_argument, "eps must be non-negative");
  PartitionValue out;
  out.n = n;
  out.delta = delta;
  out.eps = eps;

  const CandidateGrid grid =
      make_grid(system, n, 0.5 * delta, options.grid, std::max(1, potential.lc_memory()));
  out.grid = grid.description;
  out.candidates = static_cast<long long>(grid.points.size());

  std::vector<char> keep(grid.points.size());
  parallel_for(grid.points.size(), options.workers,
               [&](std::size_t i) { keep[i] = filter(grid.points[i], n) ? 1 : 0; });
  std::vector<Point> pts;
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    if (keep[i]) pts.push_back(grid.points[i]);
  out.kept = static_cast<long long>(pts.size());
  if (pts.empty()) {
    out.empty = true;
    out.log_lower = out.log_upper = kNegInf;
    return out;
  }

  std::vector<double> lw(pts.size());
  parallel_for(pts.size(), options.workers,
               [&](std::size_t i) { lw[i] = phi_eps(system, potential, pts[i], n, eps, options.sampling); });

  const SeparatedSet lo = greedy_separated(system, pts, lw, n, delta);
  out.log_lower = lo.log_sum();
  out.members_lower = static_cast<long long>(lo.points.size());
  if (lo.construction.index == std::string("ultrametric cylinder key")) {
    out.exact = true;
    out.log_upper = out.log_lower;
    out.members_upper = out.members_lower;
  } else {
    const SeparatedSet hi = greedy_separated(system, pts, lw, n, 0.5 * delta);
    out.log_upper = hi.log_sum();
    out.members_upper = static_cast<long long>(hi.points.size());
  }
  out.lower = std::exp(out.log_lower);
  out.upper = std::exp(out.log_upper);
  return out;
}

void fit_growth(PressureEstimate& est, const std::vector<long long>& ns, const std::vector<double>& lower,
                const std::vector<double>& upper) {
  const std::size_t len = ns.size();
  const std::size_t half = (len + 1) / 2;
  const std::size_t from = len - half;
  const std::size_t from_late = len - std::max<std::size_t>(2, (half + 1) / 2);
  for (std::size_t i = from; i < len; ++i)
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw Error(ErrorKind::degenerate_fit, "empty partition sum inside the fit window");
  est.fit_min = ns[from];
  est.fit_max = ns.back();
  est.fit_lower = slope_of(ns, lower, from);
  est.fit_upper = slope_of(ns, upper, from);
  const double late_lower = slope_of(ns, lower, from_late);
  const double late_upper = slope_of(ns, upper, from_late);
  double scale = 0.0;
  for (std::size_t i = from; i < len; ++i) scale = std::max({scale, std::abs(lower[i]), std::abs(upper[i])});
  // Rounding floor for the least-squares slope of values of size `scale`.
  const double floor = 1e-12 + 64 * std::numeric_limits<double>::epsilon() * scale;
  est.drift = std::max({std::abs(est.fit_lower - late_lower), std::abs(est.fit_upper - late_upper), floor});
  est.slope_lower = std::min({est.fit_lower, est.fit_upper, late_lower, late_upper}) - est.drift;
  est.slope_upper = std::max({est.fit_lower, est.fit_upper, late_lower, late_upper}) + est.drift;
}

PressureEstimate pressure_at_scale(const SystemModel& system, const Potential& potential,
                                   const SegmentFilter& filter, double delta, double eps,
                                   const std::vector<long long>& n_range, const PressureOptions& options) {
  if (n_range.size() < 5) throw Error(ErrorKind::invalid_argument, "n_range needs at least 5 values");
  if (!std::is_sorted(n_range.begin(), n_range.end()) ||
      std::adjacent_find(n_range.begin(), n_range.end()) != n_range.end())
    throw Error(ErrorKind::invalid_argument, "n_range must be strictly increasing");
  PressureEstimate est;
  est.delta = delta;
  est.eps = eps;
  std::vector<double> lo, hi;
  bool all_empty = true;
  bool monotone = true;
  for (long long n : n_range) {
    const PartitionValue v = partition_function(system, potential, filter, n, delta, eps, options);
    PressureSample s;
    s.n = n;
    s.log_lower = v.log_lower;
    s.log_upper = v.log_upper;
    s.empty = v.empty;
    s.members_lower = v.members_lower;
    s.members_upper = v.members_upper;
    all_empty = all_empty && v.empty;
    if (options.check_delta_monotonicity && !v.empty) {
      // Same candidates and weights as the delta run: the grid depends only
      // on (n, delta / 2) and the weights on eps.
      const CandidateGrid grid =
          make_grid(system, n, 0.5 * delta, options.grid, std::max(1, potential.lc_memory()));
      std::vector<Point> pts;
      for (const auto& p : grid.points)
        if (filter(p, n)) pts.push_back(p);
      std::vector<double> lw(pts.size());
      parallel_for(pts.size(), options.workers,
                   [&](std::size_t i) { lw[i] = phi_eps(system, potential, pts[i], n, eps, options.sampling); });
      s.log_lower_2delta = greedy_separated(system, pts, lw, n, 2 * delta).log_sum();
      monotone = monotone && *s.log_lower_2delta <= s.log_lower;
    }
    est.grid = v.grid;
    est.samples.push_back(s);
    lo.push_back(v.log_lower);
    hi.push_back(v.log_upper);
  }
  if (all_empty) throw Error(ErrorKind::degenerate_fit, "every partition sum is empty");
  if (options.check_delta_monotonicity) est.monotone_in_delta = monotone;
  fit_growth(est, n_range, lo, hi);
  return est;
}

double transfer_pressure_oracle(int k, const Potential& potential) {
  int m = 1;
  std::vector<double> values;
  switch (potential.kind()) {
    case PotentialKind::zero:
    case PotentialKind::constant:
      values.assign(static_cast<std::size_t>(k), potential.sup_bound());
      break;
    case PotentialKind::locally_constant:
      if (potential.lc_symbols() != k)
        throw Error(ErrorKind::invalid_argument, "potential alphabet does not match k");
      m = potential.lc_memory();
      values = potential.lc_values();
      for (auto& v : values) v += potential.offset();
      break;
    default:
      throw Error(ErrorKind::non_locally_constant, potential.name());
  }
  if (m > 6) throw Error(ErrorKind::invalid_argument, "memory above 6");
  const std::size_t states = values.size();
  const std::size_t tail = states / static_cast<std::size_t>(k);  // k^(m-1)
  // State a = (a_0 .. a_{m-1}) moves to b = (a_1 .. a_{m-1}, c) with weight exp(phi(a)).
  std::vector<double> w(states);
  for (std::size_t a = 0; a < states; ++a) w[a] = std::exp(values[a]);
  std::vector<double> v(states, 1.0), nv(states);
  double lambda = 0.0;
  for (int it = 0; it < 1000000; ++it) {
    for (std::size_t a = 0; a < states; ++a) {
      const std::size_t base = (a % tail) * static_cast<std::size_t>(k);
      CompensatedSum s;
      for (int c = 0; c < k; ++c) s.add(v[base + static_cast<std::size_t>(c)]);
      nv[a] = w[a] * s.value();
    }
    double norm = 0.0;
    for (double x : nv) norm = std::max(norm, x);
    double resid = 0.0;
    for (std::size_t a = 0; a < states; ++a) resid = std::max(resid, std::abs(nv[a] - norm * v[a]));
    lambda = norm;
    for (std::size_t a = 0; a < states; ++a) v[a] = nv[a] / norm;
    if (resid <= 1e-12 * norm && it > 2) break;
  }
  return std::log(lambda);
}

double EmpiricalMeasure::integrate(const std::function<double(const Point&)>& f) const {
  CompensatedSum s;
  for (const auto& a : atoms) s.add(a.weight * f(a.point));
  return s.value();
}

EmpiricalMeasure EmpiricalMeasure::orbit_average(const SystemModel& system) const {
  EmpiricalMeasure mu;
  mu.n = n;
  for (const auto& a : atoms) {
    Point p = a.point;
    for (long long k = 0; k < n; ++k) {
      mu.atoms.push_back({p, a.weight / static_cast<double>(n)});
      if (k + 1 < n) p = system.step(p);
    }
  }
  return mu;
}

EmpiricalMeasure empirical_equilibrium(const SystemModel& system, const Potential& potential, long long n,
                                       double delta, const GridSpec& grid, int workers) {
  // An additive constant cancels in the normalisation; dropping it keeps the
  // weights bitwise independent of it.
  const SeparatedSet set =
      build_separated_set(system, potential.shifted(-potential.offset()), n, delta, grid, workers);
  if (set.points.empty()) throw Error(ErrorKind::empty_grid, "separated set is empty");
  const double total = set.log_sum();
  EmpiricalMeasure mu;
  mu.n = n;
  for (std::size_t i = 0; i < set.points.size(); ++i)
    mu.atoms.push_back({set.points[i], std::exp(set.log_weights[i] - total)});
  return mu;
}

}  // namespace ctlab

#include "ctlab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctlab/parallel.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

double finite_time_exponent(const SystemModel& system, const Point& x, long long n, const std::string& label) {
  if (!system.has_splitting())
    throw Error(ErrorKind::no_smooth_structure, std::string(to_string(system.kind())) + " has no splitting");
  if (n < 1) throw Error(ErrorKind::invalid_argument, "horizon must be >= 1");
  const Observable obs = [&](const Point& p) { return system.bundle_log_norm(p, label); };
  return birkhoff_sum(system, obs, x, n) / static_cast<double>(n);
}

double ExponentReport::sum() const {
  CompensatedSum s;
  for (const auto& b : bundles) s.add(b.exponent);
  return s.value();
}

ExponentReport exponent_report(const SystemModel& system, long long n, std::uint64_t seed) {
  if (!system.has_splitting())
    throw Error(ErrorKind::no_smooth_structure, std::string(to_string(system.kind())) + " has no splitting");
  Rng rng(seed, 0xe7);
  Point x;
  std::vector<std::string> labels;
  if (system.kind() == SystemKind::cocycle_toy) {
    if (n > system.toy_length()) throw Error(ErrorKind::insufficient_window, "horizon exceeds toy length");
    x = ToyPoint{static_cast<long long>(rng.below(static_cast<std::uint64_t>(system.toy_length() - n + 1)))};
    labels = system.central_labels();
  } else {
    x = random_point(system, rng);
    for (const auto& b : system.splitting()) labels.push_back(b.label);
  }
  ExponentReport rep;
  for (const auto& l : labels) {
    ExponentEntry e;
    e.label = l;
    e.exponent = finite_time_exponent(system, x, n, l);
    e.n = n;
    e.seed = seed;
    if (system.kind() == SystemKind::toral_auto) e.exact = system.bundle(l).log_rate;
    rep.bundles.push_back(std::move(e));
  }
  return rep;
}

CentralObservables central_observables(const SystemModel& system, int i) {
  const auto labels = system.central_labels();
  const int k = static_cast<int>(labels.size());
  if (k < 2) throw Error(ErrorKind::invalid_argument, "need at least two central bundles");
  if (i < 1 || i > k - 1)
    throw Error(ErrorKind::invalid_argument, "split index must lie in [1, " + std::to_string(k - 1) + "]");
  CentralObservables out;
  out.first.assign(labels.begin(), labels.begin() + i);
  out.second.assign(labels.begin() + i, labels.end());
  // Copies keep the observables valid after `system` goes out of scope.
  out.beta1 = [system, first = out.first](const Point& p) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& l : first) v = std::max(v, system.bundle_log_norm(p, l, Direction::forward));
    return v;
  };
  out.beta2_hat = [system, second = out.second](const Point& p) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& l : second) v = std::min(v, system.bundle_log_norm(p, l, Direction::backward));
    return v;
  };
  return out;
}

std::map<std::string, double> averaged_central_exponents(const SystemModel& system, const EmpiricalMeasure& mu) {
  std::map<std::string, double> out;
  for (const auto& l : system.central_labels())
    out[l] = mu.integrate([&](const Point& p) { return system.bundle_log_norm(p, l); });
  return out;
}

Bracket EntropyEstimate::headline() const {
  if (scales.empty()) throw Error(ErrorKind::invalid_argument, "no scales");
  const auto it = std::min_element(scales.begin(), scales.end(),
                                   [](const EntropyScale& a, const EntropyScale& b) { return a.delta < b.delta; });
  return it->estimate.bracket();
}

EntropyEstimate entropy_estimate(const SystemModel& system, const std::vector<double>& deltas,
                                 const std::vector<long long>& n_range, const PressureOptions& options) {
  if (deltas.empty()) throw Error(ErrorKind::invalid_argument, "delta list is empty");
  EntropyEstimate out;
  for (double d : deltas)
    out.scales.push_back({d, pressure_at_scale(system, Potential::zero(), accept_all, d, 0.0, n_range, options)});
  return out;
}

namespace {

// Greedy separated count on the lattice t_j = -r + j h of [-r, r] in the
// metric stretch * |dt|. In one dimension the left-to-right greedy is a
// maximum separated subset of the lattice.
long long leaf_count(double r, double h, double stretch, double delta) {
  const long long m = static_cast<long long>(std::floor(2 * r / h));
  // Each admitted point blocks the next `step - 1` lattice sites.
  long long step = std::max(1LL, static_cast<long long>(std::floor(delta / (h * stretch))));
  while (static_cast<double>(step) * h * stretch <= delta) ++step;
  while (step > 1 && static_cast<double>(step - 1) * h * stretch > delta) --step;
  return m / step + 1;
}

}  // namespace

UnstableEntropyEstimate unstable_entropy_estimate(const SystemModel& system, double delta,
                                                  const std::vector<long long>& n_range, double disk_radius,
                                                  const std::vector<Point>& seeds, const UnstableOptions& options) {
  if (system.kind() != SystemKind::toral_auto)
    throw Error(ErrorKind::no_unstable_structure, std::string(to_string(system.kind())) + " has no unstable leaves");
  const auto& splitting = system.splitting();
  const auto it = std::find_if(splitting.begin(), splitting.end(), [](const Bundle& b) { return b.label == "u"; });
  if (it == splitting.end() || !(it->log_rate > 0))
    throw Error(ErrorKind::no_unstable_structure, "no expanding bundle labelled u");
  if (!(delta > 0) || !(disk_radius > 0)) throw Error(ErrorKind::invalid_argument, "need delta, radius > 0");
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "no seed points");
  if (!(options.oversample >= 2)) throw Error(ErrorKind::invalid_argument, "oversample must be >= 2");
  for (const auto& s : seeds) system.validate(s);

  UnstableEntropyEstimate out;
  out.label = it->label;
  out.log_rate = it->log_rate;
  out.delta = delta;
  out.disk_radius = disk_radius;
  out.seeds.resize(seeds.size());
  const double lam = std::exp(it->log_rate);
  for (long long n : n_range) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
    double stretch = 1.0, s = 1.0;
    for (long long k = 1; k < n; ++k) stretch = std::max(stretch, s *= lam);
    if (2 * disk_radius * stretch / delta * options.oversample > 1e18)
      throw Error(ErrorKind::invalid_argument, "unstable disk lattice too large at n=" + std::to_string(n));
  }

  // Leaf distances are translation invariant for linear models, so each seed
  // runs the same count; seeds are kept for the record and for the maximum.
  parallel_for(seeds.size(), options.workers, [&](std::size_t i) {
    UnstableSeed& us = out.seeds[i];
    us.seed = seeds[i];
    for (long long n : n_range) {
      double stretch = 1.0, s = 1.0;
      for (long long k = 1; k < n; ++k) stretch = std::max(stretch, s *= lam);
      const double h = delta / (options.oversample * stretch);
      us.count_lower.push_back(leaf_count(disk_radius, h, stretch, delta));
      us.count_upper.push_back(leaf_count(disk_radius, h, stretch, 0.5 * delta));
    }
  });

  std::vector<double> lo, hi;
  for (std::size_t j = 0; j < n_range.size(); ++j) {
    long long a = 0, b = 0;
    for (const auto& us : out.seeds) {
      a = std::max(a, us.count_lower[j]);
      b = std::max(b, us.count_upper[j]);
    }
    lo.push_back(std::log(static_cast<double>(a)));
    hi.push_back(std::log(static_cast<double>(b)));
    PressureSample ps;
    ps.n = n_range[j];
    ps.log_lower = lo.back();
    ps.log_upper = hi.back();
    ps.members_lower = a;
    ps.members_upper = b;
    out.fit.samples.push_back(ps);
  }
  out.fit.delta = delta;
  out.fit.grid = "unstable segment lattice";
  if (n_range.size() < 5) throw Error(ErrorKind::invalid_argument, "n_range needs at least 5 values");
  fit_growth(out.fit, n_range, lo, hi);
  return out;
}

EntropyGapReport entropy_gap_report(const SystemModel& system, const Potential& potential,
                                    const EntropyGapConfig& config) {
  EntropyGapReport rep;
  const auto top = entropy_estimate(system, config.entropy_deltas, config.entropy_n, config.pressure);
  rep.h_top = top.headline();
  rep.grid = top.scales.front().estimate.grid;

  const SystemModel inv = system.inverse();
  std::vector<Point> seeds;
  for (int i = 0; i < config.seeds; ++i) {
    Rng rng(config.seed, 0x5eed, static_cast<std::uint64_t>(i));
    seeds.push_back(random_point(system, rng));
  }
  UnstableOptions uo;
  uo.workers = config.pressure.workers;
  rep.h_u = unstable_entropy_estimate(system, config.unstable_delta, config.unstable_n, config.disk_radius, seeds, uo)
                .bracket();
  rep.h_s = unstable_entropy_estimate(inv, config.unstable_delta, config.unstable_n, config.disk_radius, seeds, uo)
                .bracket();

  rep.sup_phi = potential.sup_bound();
  rep.inf_phi = potential.inf_bound();
  const double osc = rep.sup_phi - rep.inf_phi;
  rep.margin_bracket.lo = rep.h_top.lo - std::max(rep.h_u.hi, rep.h_s.hi) - osc;
  rep.margin_bracket.hi = rep.h_top.hi - std::max(rep.h_u.lo, rep.h_s.lo) - osc;
  rep.margin = rep.margin_bracket.lo;
  rep.holds = rep.margin > 0;
  return rep;
}

}  // namespace ctlab

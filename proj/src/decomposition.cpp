#include "ctlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctlab/rng.hpp"

namespace ctlab {

namespace {

struct Sums {
  std::vector<double> forward;   // S_k beta1(x), k = 0..n
  std::vector<double> backward;  // S^-1_k beta2_hat(f^{n-1} x), k = 0..n
};

Sums central_sums(const SystemModel& system, const CentralObservables& obs, const Point& x, long long n) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "segment length must be >= 0");
  Sums s;
  s.forward = birkhoff_prefix(system, obs.beta1, x, n);
  std::vector<double> b(static_cast<std::size_t>(n));
  Point p = x;
  for (long long i = 0; i < n; ++i) {
    b[static_cast<std::size_t>(i)] = obs.beta2_hat(p);
    if (i + 1 < n) p = system.step(p);
  }
  s.backward.assign(static_cast<std::size_t>(n) + 1, 0.0);
  CompensatedSum acc;
  for (long long k = 1; k <= n; ++k) {
    acc.add(b[static_cast<std::size_t>(n - k)]);
    s.backward[static_cast<std::size_t>(k)] = acc.value();
  }
  return s;
}

void check_r(double r) {
  if (!(r > 0) || !std::isfinite(r)) throw Error(ErrorKind::invalid_argument, "r must be positive");
}

bool good(const Sums& s, long long n, double r) {
  for (long long k = 1; k <= n; ++k) {
    const double bound = -r * static_cast<double>(k);
    if (!(s.forward[static_cast<std::size_t>(k)] < bound) || !(s.backward[static_cast<std::size_t>(k)] < bound))
      return false;
  }
  return true;
}

}  // namespace

DecompTriple decompose(const SystemModel& system, const CentralObservables& obs, const Point& x, long long n,
                       double r) {
  check_r(r);
  const Sums s = central_sums(system, obs, x, n);
  DecompTriple t;
  t.r = r;
  t.segment = {x, n};
  for (long long k = n; k >= 0; --k)
    if (s.forward[static_cast<std::size_t>(k)] >= -r * static_cast<double>(k)) {
      t.p = k;
      break;
    }
  for (long long k = n - t.p; k >= 0; --k)
    if (s.backward[static_cast<std::size_t>(k)] >= -r * static_cast<double>(k)) {
      t.s = k;
      break;
    }
  t.g = n - t.p - t.s;
  return t;
}

Membership classify(const SystemModel& system, const CentralObservables& obs, const Point& x, long long n,
                    double r) {
  check_r(r);
  const Sums s = central_sums(system, obs, x, n);
  const double bound = -r * static_cast<double>(n);
  Membership m;
  m.in_P = s.forward.back() >= bound;
  m.in_G = good(s, n, r);
  m.in_S = s.backward.back() >= bound && !m.in_P;
  return m;
}

BlockCheck check_blocks(const SystemModel& system, const CentralObservables& obs, const DecompTriple& t) {
  BlockCheck c;
  const Point& x = t.segment.x;
  const double r = t.r;
  c.prefix_in_P = classify(system, obs, x, t.p, r).in_P;
  const Point mid = system.iterate(x, t.p);
  c.middle_in_G = classify(system, obs, mid, t.g, r).in_G;
  const Point tail = system.iterate(mid, t.g);
  const Sums s = central_sums(system, obs, tail, t.s);
  c.suffix_in_S = s.backward.back() >= -r * static_cast<double>(t.s);
  c.suffix_also_in_P = s.forward.back() >= -r * static_cast<double>(t.s);
  return c;
}

ContinuityCertificate continuity_modulus(const SystemModel& system, const CentralObservables& obs, double r,
                                         const PairSampling& sampling) {
  check_r(r);
  const double tol = 0.5 * r;
  const double top = system.ambient_diameter();
  ContinuityCertificate cert;

  if (system.kind() == SystemKind::cocycle_toy) {
    // Every pair at lag m has distance spacing * m; record the worst
    // difference per lag and read the ladder off it.
    cert.exhaustive = true;
    const long long len = system.toy_length();
    std::vector<double> b1(static_cast<std::size_t>(len)), b2(static_cast<std::size_t>(len));
    for (long long i = 0; i < len; ++i) {
      b1[static_cast<std::size_t>(i)] = obs.beta1(ToyPoint{i});
      b2[static_cast<std::size_t>(i)] = obs.beta2_hat(ToyPoint{i});
    }
    std::vector<double> worst(static_cast<std::size_t>(len), 0.0);
    std::vector<long long> arg(static_cast<std::size_t>(len), 0);
    for (long long m = 1; m < len; ++m)
      for (long long i = 0; i + m < len; ++i) {
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(i + m);
        const double d = std::max(std::abs(b1[a] - b1[b]), std::abs(b2[a] - b2[b]));
        if (d > worst[static_cast<std::size_t>(m)]) {
          worst[static_cast<std::size_t>(m)] = d;
          arg[static_cast<std::size_t>(m)] = i;
        }
      }
    for (int j = 0; j <= sampling.rungs; ++j) {
      const double eps = std::ldexp(top, -j);
      double w = 0.0;
      long long pairs = 0, fail_m = -1;
      for (long long m = 1; m < len && system.spacing() * static_cast<double>(m) < eps; ++m) {
        w = std::max(w, worst[static_cast<std::size_t>(m)]);
        pairs += len - m;
        if (fail_m < 0 && worst[static_cast<std::size_t>(m)] > tol) fail_m = m;
      }
      cert.pairs_tested += pairs;
      if (fail_m < 0) {
        cert.eps_hat = eps;
        cert.rung = j;
        cert.worst_difference = w;
        return cert;
      }
      const long long i = arg[static_cast<std::size_t>(fail_m)];
      cert.failing_x = ToyPoint{i};
      cert.failing_y = ToyPoint{i + fail_m};
      cert.failing_distance = system.spacing() * static_cast<double>(fail_m);
      cert.failing_difference = worst[static_cast<std::size_t>(fail_m)];
    }
    cert.eps_hat = std::ldexp(top, -sampling.rungs);
    cert.rung = sampling.rungs;
    return cert;
  }

  if (system.kind() != SystemKind::toral_auto)
    throw Error(ErrorKind::no_smooth_structure, std::string(to_string(system.kind())) + " has no central observables");
  const int d = system.dim();
  for (int j = 0; j <= sampling.rungs; ++j) {
    const double eps = std::ldexp(top, -j);
    double w = 0.0;
    bool fail = false;
    double fail_dist = 0.0;
    for (int i = 0; i < sampling.pairs; ++i) {
      Rng rng(sampling.seed, 0xc0 + static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
      const Point x = random_point(system, rng);
      std::vector<double> w_dir(static_cast<std::size_t>(d));
      double norm = 0.0;
      for (auto& c : w_dir) {
        // Box-Muller keeps directions isotropic.
        const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        c = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
        norm += c * c;
      }
      norm = std::sqrt(norm);
      if (norm == 0) continue;
      // Radii biased towards the rung so the worst pairs are reached.
      const double radius = std::min(eps, 0.5) * std::pow(rng.uniform(), 0.25);
      for (auto& c : w_dir) c *= radius / norm;
      const Point y = translate(std::get<TorusPoint>(x), w_dir);
      const double dist = system.distance(x, y);
      if (!(dist < eps)) continue;
      ++cert.pairs_tested;
      const double diff = std::max(std::abs(obs.beta1(x) - obs.beta1(y)), std::abs(obs.beta2_hat(x) - obs.beta2_hat(y)));
      w = std::max(w, diff);
      if (diff > tol && (!fail || dist < fail_dist)) {
        fail = true;
        fail_dist = dist;
        cert.failing_x = x;
        cert.failing_y = y;
        cert.failing_distance = dist;
        cert.failing_difference = diff;
      }
    }
    if (!fail) {
      cert.eps_hat = eps;
      cert.rung = j;
      cert.worst_difference = w;
      return cert;
    }
  }
  cert.eps_hat = std::ldexp(top, -sampling.rungs);
  cert.rung = sampling.rungs;
  return cert;
}

ShrinkReport g_shrink_check(const SystemModel& system, const CentralObservables& obs,
                            const std::vector<Segment>& segments, double r, double eps_hat,
                            const BallSampling& sampling) {
  check_r(r);
  ShrinkReport rep;
  for (const auto& seg : segments) {
    ++rep.segments;
    if (!classify(system, obs, seg.x, seg.n, r).in_G) {
      ++rep.not_in_G;
      continue;
    }
    for (const auto& y : sample_bowen_ball(system, seg.x, seg.n, eps_hat, sampling)) {
      ++rep.samples;
      if (!classify(system, obs, y, seg.n, 0.5 * r).in_G) {
        ++rep.violations;
        if (rep.examples.size() < 8) rep.examples.push_back({seg, y});
      }
    }
  }
  return rep;
}

}  // namespace ctlab

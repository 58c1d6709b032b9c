#include "ctlab/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ctlab/parallel.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

void BowenPropertyConfig::validate() const {
  if (!(C > 0) || !(delta0 > 0) || !(r > 0) || !(Q >= 0) || !(alpha > 0) || alpha > 1)
    throw Error(ErrorKind::invalid_config, "Bowen constants need C, delta0, r, alpha > 0, Q >= 0, alpha <= 1");
}

KSeries bowen_constant(const BowenPropertyConfig& config) {
  config.validate();
  const double r = config.r, a = config.alpha;
  auto tail = [&](long long k) {
    return std::exp(-static_cast<double>(k) * r * a / 4) * std::pow(2.0, a) / (1 - std::exp(-r * a / 4));
  };
  KSeries out;
  CompensatedSum sum;
  while (tail(out.terms) >= 1e-12) {
    const double k = static_cast<double>(out.terms);
    sum.add(std::pow(std::exp(-k * r / 2) + std::exp(-k * r / 4), a));
    ++out.terms;
  }
  out.tail_bound = tail(out.terms);
  out.K = config.Q * std::pow(config.C * config.delta0, a) * sum.value();
  return out;
}

double BowenReport::sup_over(long long lo, long long hi) const {
  double s = 0.0;
  for (const auto& r : records)
    if (r.n >= lo && r.n <= hi) s = std::max(s, r.distortion);
  return s;
}

namespace {

// Real orbit displacements A^k w for k < n, in ambient coordinates.
std::vector<Eigen::VectorXd> linear_orbit(const SystemModel& system, const Eigen::VectorXd& c, long long n) {
  const auto& split = system.splitting();
  const int d = system.dim();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) w += c[j] * std::pow(split[j].eigenvalue, static_cast<double>(k)) * split[j].direction;
    out.push_back(std::move(w));
  }
  return out;
}

DistortionRecord toral_distortion(const SystemModel& system, const Potential& potential, const Segment& seg,
                                  double eps, const BallSampling& sampling) {
  DistortionRecord rec;
  rec.n = seg.n;
  const int d = system.dim();
  const auto& split = system.splitting();
  std::vector<Point> orbit;
  orbit.reserve(static_cast<std::size_t>(seg.n));
  Point p = seg.x;
  for (long long k = 0; k < seg.n; ++k) {
    orbit.push_back(p);
    if (k + 1 < seg.n) p = system.step(p);
  }
  const double phi_x = birkhoff_sum(system, potential, seg.x, seg.n);
  for (int rung = sampling.min_rung; rung <= sampling.max_rung; ++rung) {
    const double rho = std::ldexp(1.0, -rung);
    if (rho > eps || rho >= 0.5) continue;
    for (int t = 0; t < sampling.samples; ++t) {
      Rng rng(sampling.seed, 0xb0e, static_cast<std::uint64_t>(t));
      Eigen::VectorXd c(d);
      for (int j = 0; j < d; ++j) {
        const double rate = split[j].log_rate;
        c[j] = rng.uniform(-1.0, 1.0) * (rate > 0 ? std::exp(-static_cast<double>(seg.n - 1) * rate) : 1.0);
      }
      auto disp = linear_orbit(system, c, seg.n);
      double m = 0.0;
      for (const auto& w : disp) m = std::max(m, w.norm());
      if (!(m > 0)) continue;
      // Scale onto the sphere of radius just inside rho in the d_n norm.
      const double s = rho * (1 - 1e-9) / m;
      CompensatedSum phi_y;
      bool inside = true;
      for (long long k = 0; k < seg.n && inside; ++k) {
        Eigen::VectorXd w = disp[static_cast<std::size_t>(k)] * s;
        std::vector<double> wv(w.data(), w.data() + d);
        const Point yk = translate(std::get<TorusPoint>(orbit[static_cast<std::size_t>(k)]), wv);
        inside = system.distance(orbit[static_cast<std::size_t>(k)], yk) < eps;
        phi_y.add(potential(yk));
      }
      if (!inside) continue;
      ++rec.samples;
      rec.distortion = std::max(rec.distortion, std::abs(phi_y.value() - phi_x));
    }
  }
  return rec;
}

}  // namespace

BowenReport bowen_property_check(const SystemModel& system, const Potential& potential,
                                 const std::vector<Segment>& segments, double eps,
                                 const BowenPropertyConfig& config, const BallSampling& sampling,
                                 const CentralObservables* obs, int workers) {
  if (!(eps > 0)) throw Error(ErrorKind::invalid_argument, "eps must be positive");
  BowenReport rep;
  rep.theory = bowen_constant(config);
  rep.segments = static_cast<long long>(segments.size());
  std::vector<char> use(segments.size(), 1);
  if (obs)
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (!classify(system, *obs, segments[i].x, segments[i].n, config.r).in_G) {
        use[i] = 0;
        ++rep.skipped_not_in_G;
      }
  std::vector<DistortionRecord> recs(segments.size());
  parallel_for(segments.size(), workers, [&](std::size_t i) {
    if (!use[i]) return;
    const Segment& seg = segments[i];
    if (system.kind() == SystemKind::toral_auto) {
      recs[i] = toral_distortion(system, potential, seg, eps, sampling);
      return;
    }
    DistortionRecord rec;
    rec.n = seg.n;
    const double phi_x = birkhoff_sum(system, potential, seg.x, seg.n);
    for (const auto& y : sample_bowen_ball(system, seg.x, seg.n, eps, sampling)) {
      ++rec.samples;
      rec.distortion = std::max(rec.distortion, std::abs(birkhoff_sum(system, potential, y, seg.n) - phi_x));
    }
    recs[i] = rec;
  });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!use[i]) continue;
    rep.samples += recs[i].samples;
    rep.empirical_sup = std::max(rep.empirical_sup, recs[i].distortion);
    rep.records.push_back(recs[i]);
  }
  rep.holds = rep.empirical_sup <= rep.theory.K;
  return rep;
}

namespace {

bool verify_glue(const SystemModel& system, const Point& y, const std::vector<Segment>& segs,
                 const std::vector<long long>& starts, std::size_t upto, double thr, std::vector<double>* dist) {
  bool ok = true;
  if (dist) dist->assign(upto, 0.0);
  for (std::size_t i = 0; i < upto; ++i) {
    const double d = bowen_distance(system, system.iterate(y, starts[i]), segs[i].x, segs[i].n);
    if (dist) (*dist)[i] = d;
    if (!(d < thr)) {
      ok = false;
      if (!dist) return false;
    }
  }
  return ok;
}

SpecificationResult glue_shift(const SystemModel& system, const std::vector<Segment>& segments, double delta) {
  if (system.time_reversed())
    throw Error(ErrorKind::unsupported_direction, "specification search runs on the forward shift");
  SpecificationResult res;
  std::vector<Segment> words;
  std::vector<std::uint8_t> all;
  long long t = 0;
  for (const auto& s : segments) {
    const auto& p = std::get<ShiftPoint>(s.x);
    std::vector<std::uint8_t> w;
    for (long long i = 0; i < s.n; ++i) w.push_back(p.at(static_cast<int>(i)));
    all.insert(all.end(), w.begin(), w.end());
    words.push_back({ShiftPoint{0, w}, s.n});
    res.starts.push_back(t);
    t += s.n;
  }
  for (std::size_t i = 1; i < segments.size(); ++i) res.gaps.push_back(0);
  res.y = ShiftPoint{0, all};
  res.ok = verify_glue(system, res.y, words, res.starts, words.size(), delta, &res.distances);
  res.note = "concatenation of the segment words";
  return res;
}

}  // namespace

SpecificationResult specification_search(const SystemModel& system, const std::vector<Segment>& segments,
                                         double delta, long long max_gap) {
  if (segments.empty()) throw Error(ErrorKind::invalid_argument, "no segments");
  if (!(delta > 0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
  for (const auto& s : segments) {
    if (s.n < 1) throw Error(ErrorKind::invalid_argument, "segment lengths must be >= 1");
    system.validate(s.x);
  }
  if (system.kind() == SystemKind::full_shift) return glue_shift(system, segments, delta);
  if (system.kind() != SystemKind::toral_auto)
    throw Error(ErrorKind::invalid_argument, "specification search supports shifts and toral automorphisms");

  const auto& split = system.splitting();
  const int d = system.dim();
  double weakest = std::numeric_limits<double>::infinity();
  for (const auto& b : split) {
    if (std::abs(b.log_rate) < 1e-12)
      throw Error(ErrorKind::invalid_argument, "specification search needs a hyperbolic automorphism");
    weakest = std::min(weakest, std::abs(b.log_rate));
  }
  const Eigen::MatrixXd& binv = system.eigenbasis_inverse();

  SpecificationResult best;
  best.predicted_gap = static_cast<long long>(std::ceil(std::log(4 / delta) / weakest));
  if (segments.size() == 1) {
    best.y = segments[0].x;
    best.starts = {0};
    best.ok = verify_glue(system, best.y, segments, best.starts, 1, delta, &best.distances);
    return best;
  }

  // Integer lifts of the jump, 3^d of them.
  std::vector<Eigen::VectorXd> lifts;
  const int nl = static_cast<int>(std::pow(3, d));
  for (int code = 0; code < nl; ++code) {
    Eigen::VectorXd m(d);
    int c = code;
    for (int j = 0; j < d; ++j) {
      m[j] = static_cast<double>(c % 3) - 1;
      c /= 3;
    }
    lifts.push_back(m);
  }

  // First pass accepts each junction once all segments so far verify below
  // delta; later junctions can perturb earlier segments, so a second pass
  // keeps intermediate distances below delta / 2.
  for (double thr : {delta, 0.5 * delta}) {
    SpecificationResult res;
    res.predicted_gap = best.predicted_gap;
    res.y = segments[0].x;
    res.starts = {0};
    bool failed = false;
    for (std::size_t j = 1; j < segments.size() && !failed; ++j) {
      const long long prev_end = res.starts.back() + segments[j - 1].n - 1;
      bool found = false;
      for (long long tau = 0; tau <= max_gap && !found; ++tau) {
        const long long start = prev_end + 1 + tau;
        for (long long b = 0; b <= tau + 1 && !found; ++b) {
          const long long tz = start - b;  // time of the jump
          const Point p = system.iterate(res.y, tz);
          const Point q = system.iterate(segments[j].x, -b);
          const Eigen::VectorXd v0 = displacement(std::get<TorusPoint>(p), std::get<TorusPoint>(q));
          for (const auto& lift : lifts) {
            const Eigen::VectorXd c = binv * (v0 + lift);
            Eigen::VectorXd vu = Eigen::VectorXd::Zero(d);
            for (int i = 0; i < d; ++i)
              if (split[i].log_rate > 0) vu += c[i] * split[i].direction;
            std::vector<double> wv(vu.data(), vu.data() + d);
            const Point z = translate(std::get<TorusPoint>(p), wv);
            const Point y = system.iterate(z, -tz);
            auto starts = res.starts;
            starts.push_back(start);
            if (verify_glue(system, y, segments, starts, j + 1, thr, nullptr)) {
              res.y = y;
              res.starts = std::move(starts);
              res.gaps.push_back(tau);
              found = true;
              break;
            }
          }
        }
      }
      failed = !found;
    }
    if (failed) {
      res.note = "no gap up to max_gap verified";
      best = res;
      continue;
    }
    res.ok = verify_glue(system, res.y, segments, res.starts, segments.size(), delta, &res.distances);
    if (res.ok) return res;
    res.note = "final verification failed";
    best = res;
  }
  if (best.distances.size() != segments.size() && best.starts.size() == segments.size())
    verify_glue(system, best.y, segments, best.starts, segments.size(), delta, &best.distances);
  return best;
}

double expansivity_window(const SystemModel& system, const Point& x, double eps, long long N,
                          const WindowGrid& grid) {
  if (N < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
  if (eps < 0) throw Error(ErrorKind::invalid_argument, "eps must be non-negative");
  system.validate(x);
  if (eps == 0) return 0.0;
  if (system.kind() == SystemKind::full_shift) {
    // Disagreement is allowed only at |i| >= N + R, R the least m with 2^-(m+1) <= eps.
    int r = 0;
    while (std::ldexp(1.0, -(r + 1)) > eps) ++r;
    return std::ldexp(1.0, -static_cast<int>(N) - r - 1);
  }
  if (system.kind() != SystemKind::toral_auto)
    throw Error(ErrorKind::invalid_argument, "expansivity windows need an invertible shift or torus map");
  if (eps >= 0.25) throw Error(ErrorKind::invalid_argument, "eps must be below 1/4 on the torus");

  const int d = system.dim();
  const auto& split = system.splitting();
  std::vector<Eigen::VectorXd> dirs;
  for (const auto& b : split) dirs.push_back(b.direction);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      dirs.push_back((split[i].direction + split[j].direction).normalized());
      dirs.push_back((split[i].direction - split[j].direction).normalized());
    }
  for (int t = 0; t < grid.directions; ++t) {
    Rng rng(grid.seed, 0xd1, static_cast<std::uint64_t>(t));
    Eigen::VectorXd u(d);
    for (int j = 0; j < d; ++j) {
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      u[j] = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }
    if (u.norm() > 0) dirs.push_back(u.normalized());
  }
  const Eigen::MatrixXd& binv = system.eigenbasis_inverse();
  double best = 0.0;
  for (const auto& u : dirs) {
    const Eigen::VectorXd c = binv * u;
    double m = 0.0;
    for (long long k = -N; k <= N; ++k) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < d; ++j)
        w += c[j] * std::pow(split[j].eigenvalue, static_cast<double>(k)) * split[j].direction;
      m = std::max(m, w.norm());
    }
    best = std::max(best, eps / m);
  }
  return 2 * best;
}

ExpansivityReport pexp_obstruction_estimate(const SystemModel& system, const Potential& potential, double eps,
                                            const PexpOptions& options) {
  if (options.N < 2) throw Error(ErrorKind::invalid_argument, "N must be >= 2");
  ExpansivityReport rep;
  std::vector<SeedWindows> seeds(static_cast<std::size_t>(options.seeds));
  parallel_for(seeds.size(), options.pressure.workers, [&](std::size_t i) {
    Rng rng(options.seed, 0xe5, static_cast<std::uint64_t>(i));
    SeedWindows& sw = seeds[i];
    sw.seed = random_point(system, rng);
    for (long long N = 1; N <= options.N; ++N)
      sw.diameters.push_back(expansivity_window(system, sw.seed, eps, N, options.grid));
    const long long half = (options.N + 1) / 2;
    const double a = sw.diameters[static_cast<std::size_t>(half - 1)], b = sw.diameters.back();
    sw.late_ratio = a > 0 ? std::pow(b / a, 1.0 / static_cast<double>(options.N - half)) : 0.0;
    sw.flagged = sw.late_ratio > options.flag_ratio;
  });
  rep.seeds = std::move(seeds);
  std::vector<Point> flagged;
  for (const auto& s : rep.seeds)
    if (s.flagged) flagged.push_back(s.seed);
  rep.empty = flagged.empty();
  if (rep.empty) return rep;

  const SegmentFilter near_flagged = [&](const Point& x, long long n) {
    Point p = x;
    for (long long k = 0; k < n; ++k) {
      for (const auto& s : flagged)
        if (system.distance(p, s) < eps) return true;
      if (k + 1 < n) p = system.step(p);
    }
    return false;
  };
  PressureOptions po = options.pressure;
  if (const auto* t = std::get_if<TorusPoint>(&flagged.front())) po.grid.center = coordinates(*t);
  try {
    rep.pressure = pressure_at_scale(system, potential, near_flagged, options.delta, 0.0, options.n_range, po);
  } catch (const Error& e) {
    rep.note = e.what();
  }
  return rep;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Verdict CTReport::bad_pressure_verdict() const {
  if (!pressure_all) return Verdict::indeterminate;
  const Bracket all = pressure_all->bracket();
  if (bad_empty) return a_param < all.lo ? Verdict::pass : Verdict::indeterminate;
  if (!pressure_bad) return Verdict::indeterminate;
  const Bracket bad = pressure_bad->bracket();
  if (bad.hi < a_param && a_param < all.lo) return Verdict::pass;
  if (bad.lo >= all.hi) return Verdict::fail;
  return Verdict::indeterminate;
}

Verdict CTReport::bowen_verdict() const {
  if (!bowen) return Verdict::indeterminate;
  return bowen->holds ? Verdict::pass : Verdict::fail;
}

Verdict CTReport::specification_verdict() const {
  if (spec_success_rate == 1.0) return Verdict::pass;
  return spec_success_rate > 0 ? Verdict::fail : Verdict::indeterminate;
}

Verdict CTReport::expansivity_verdict() const {
  if (!expansivity) return Verdict::indeterminate;
  if (expansivity->empty) return Verdict::pass;
  if (!pressure_all || !expansivity->pressure) return Verdict::indeterminate;
  const Bracket all = pressure_all->bracket(), ex = expansivity->pressure->bracket();
  if (ex.hi < all.lo) return Verdict::pass;
  if (ex.lo >= all.hi) return Verdict::fail;
  return Verdict::indeterminate;
}

bool CTReport::all_pass() const {
  return scale_ok && bad_pressure_verdict() == Verdict::pass && bowen_verdict() == Verdict::pass &&
         specification_verdict() == Verdict::pass && expansivity_verdict() == Verdict::pass;
}

namespace {

}  // namespace

Segment random_segment(const SystemModel& system, Rng& rng, long long max_n) {
  const long long n = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(max_n)));
  if (system.kind() == SystemKind::full_shift) {
    // Room on both sides for potentials with memory and for ball samples.
    std::vector<std::uint8_t> w(static_cast<std::size_t>(n + 64));
    for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(system.symbols())));
    return {ShiftPoint{-32, w}, n};
  }
  if (system.kind() == SystemKind::cocycle_toy) {
    const long long m = std::min(n, system.toy_length());
    return {ToyPoint{static_cast<long long>(rng.below(static_cast<std::uint64_t>(system.toy_length() - m + 1)))}, m};
  }
  return {random_point(system, rng, static_cast<int>(n) + 64), n};
}

CTReport ct_report(const SystemModel& system, const Potential& potential, const CTConfig& config) {
  if (!(config.delta > 0) || !(config.eps > 0) || !(config.r > 0) || !(config.a_param > 0))
    throw Error(ErrorKind::invalid_config, "delta, eps, r and a_param must be positive");
  CTReport rep;
  rep.delta = config.delta;
  rep.eps = config.eps;
  rep.r = config.r;
  rep.a_param = config.a_param;
  rep.scale_ok = config.eps > 2000 * config.delta;
  if (!rep.scale_ok) rep.notes.push_back("eps <= 2000 delta: overall verdict withheld");

  PressureOptions po = config.pressure;
  po.workers = config.workers;

  std::optional<CentralObservables> obs;
  try {
    if (system.has_splitting() && system.central_labels().size() >= 2)
      obs = central_observables(system, config.split_index);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("central observables: ") + e.what());
  }
  rep.trivial_decomposition = !obs;
  if (rep.trivial_decomposition) rep.notes.push_back("no central splitting: every segment is in G");

  try {
    rep.pressure_all = pressure_at_scale(system, potential, accept_all, config.delta, config.eps, config.n_range, po);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("pressure_all: ") + e.what());
  }

  if (rep.trivial_decomposition) {
    rep.bad_empty = true;
  } else {
    const SegmentFilter bad = [&](const Point& x, long long n) {
      const auto m = classify(system, *obs, x, n, config.r);
      return m.in_P || m.in_S;
    };
    try {
      rep.pressure_bad = pressure_at_scale(system, potential, bad, config.delta, config.eps, config.n_range, po);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::degenerate_fit && std::string(e.what()).find("every") != std::string::npos)
        rep.bad_empty = true;
      else
        rep.notes.push_back(std::string("pressure_bad: ") + e.what());
    }
  }

  auto good = [&](const Segment& s) { return !obs || classify(system, *obs, s.x, s.n, config.r).in_G; };

  try {
    BowenPropertyConfig bc = config.bowen;
    bc.r = config.r;
    bc.Q = potential.holder_Q();
    bc.alpha = potential.holder_alpha();
    if (config.bowen_from_system) {
      bc.C = system.kind() == SystemKind::toral_auto ? system.condition_number() : 1.0;
      bc.delta0 = config.eps;
    }
    std::vector<Segment> segs;
    for (int i = 0; segs.size() < static_cast<std::size_t>(config.bowen_segments) && i < 100 * config.bowen_segments;
         ++i) {
      Rng rng(config.seed, 0xb5, static_cast<std::uint64_t>(i));
      Segment s = random_segment(system, rng, config.bowen_max_n);
      if (good(s)) segs.push_back(std::move(s));
    }
    BallSampling bs = config.bowen_sampling;
    bs.seed = config.seed;
    rep.bowen = bowen_property_check(system, potential, segs, config.eps, bc, bs, obs ? &*obs : nullptr,
                                     config.workers);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("bowen: ") + e.what());
  }

  try {
    std::vector<std::pair<Segment, Segment>> pairs;
    for (int i = 0; pairs.size() < static_cast<std::size_t>(config.spec_pairs) && i < 100 * config.spec_pairs; ++i) {
      Rng rng(config.seed, 0x5bec, static_cast<std::uint64_t>(i));
      Segment a = random_segment(system, rng, config.spec_max_n), b = random_segment(system, rng, config.spec_max_n);
      if (good(a) && good(b)) pairs.emplace_back(std::move(a), std::move(b));
    }
    std::vector<SpecificationResult> res(pairs.size());
    parallel_for(pairs.size(), config.workers, [&](std::size_t i) {
      res[i] = specification_search(system, {pairs[i].first, pairs[i].second}, config.delta);
    });
    long long ok = 0;
    for (const auto& r : res) {
      ok += r.ok;
      if (!r.gaps.empty()) rep.spec_max_gap = std::max(rep.spec_max_gap, r.gaps.front());
      rep.spec_predicted_gap = r.predicted_gap;
    }
    rep.spec_success_rate = pairs.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(pairs.size());
  } catch (const Error& e) {
    rep.notes.push_back(std::string("specification: ") + e.what());
  }

  try {
    PexpOptions pe = config.pexp;
    pe.seed = config.seed;
    pe.pressure = po;
    pe.delta = config.delta;
    rep.expansivity = pexp_obstruction_estimate(system, potential, config.eps, pe);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("expansivity: ") + e.what());
  }
  return rep;
}

}  // namespace ctlab

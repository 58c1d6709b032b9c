#include "ctlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctlab/numeric.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

Potential Potential::zero() { return Potential{}; }

Potential Potential::constant(double c) {
  Potential p;
  p.kind_ = PotentialKind::constant;
  p.name_ = "constant";
  p.offset_ = c;
  return p;
}

Potential Potential::trig(std::vector<TrigTerm> terms) {
  if (terms.empty()) throw Error(ErrorKind::invalid_argument, "trig potential needs terms");
  Potential p;
  p.kind_ = PotentialKind::trig;
  p.name_ = "trig";
  const auto dim = terms.front().k.size();
  for (const auto& t : terms) {
    if (t.k.size() != dim || dim == 0 || dim > static_cast<std::size_t>(kMaxDim))
      throw Error(ErrorKind::invalid_argument, "trig wave vectors must share one dimension");
    double kn = 0;
    for (auto v : t.k) kn += static_cast<double>(v) * static_cast<double>(v);
    p.q_ += 2.0 * std::numbers::pi * std::abs(t.a) * std::sqrt(kn);
    p.sup_ += std::abs(t.a);
  }
  p.inf_ = -p.sup_;
  p.alpha_ = 1.0;
  p.terms_ = std::move(terms);
  return p;
}

Potential Potential::locally_constant(int k, int m, std::vector<double> values) {
  if (k < 2 || m < 1) throw Error(ErrorKind::invalid_argument, "locally constant needs k>=2, m>=1");
  std::size_t count = 1;
  for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(k);
  if (values.size() != count)
    throw Error(ErrorKind::invalid_argument, "locally constant needs k^m values");
  Potential p;
  p.kind_ = PotentialKind::locally_constant;
  p.name_ = "locally_constant";
  p.lc_k_ = k;
  p.lc_m_ = m;
  p.sup_ = *std::max_element(values.begin(), values.end());
  p.inf_ = *std::min_element(values.begin(), values.end());
  // Words agreeing on [0, m) give equal values and d >= 2^-m otherwise.
  p.q_ = (p.sup_ - p.inf_) * std::ldexp(1.0, m);
  p.alpha_ = 1.0;
  p.lc_values_ = std::move(values);
  return p;
}

Potential Potential::custom(std::string name, Evaluator f, double Q, double alpha, double sup_bound,
                            double inf_bound) {
  if (!(alpha > 0 && alpha <= 1) || Q < 0 || inf_bound > sup_bound)
    throw Error(ErrorKind::invalid_argument, "bad custom potential constants");
  Potential p;
  p.kind_ = PotentialKind::custom;
  p.name_ = std::move(name);
  p.custom_ = std::move(f);
  p.q_ = Q;
  p.alpha_ = alpha;
  p.sup_ = sup_bound;
  p.inf_ = inf_bound;
  return p;
}

Potential Potential::with_holder(double Q, double alpha) const {
  if (!(alpha > 0 && alpha <= 1) || Q < 0)
    throw Error(ErrorKind::invalid_argument, "Hölder constants out of range");
  Potential p = *this;
  p.q_ = Q;
  p.alpha_ = alpha;
  return p;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  p.offset_ += c;
  return p;
}

double Potential::operator()(const Point& x) const {
  switch (kind_) {
    case PotentialKind::zero:
      return offset_;
    case PotentialKind::constant:
      return sup_ + offset_;
    case PotentialKind::trig: {
      const auto* t = std::get_if<TorusPoint>(&x);
      if (!t || static_cast<std::size_t>(t->dim) != terms_.front().k.size())
        throw Error(ErrorKind::mismatched_variants, "trig potential needs a torus point");
      double v = 0.0;
      for (const auto& term : terms_) {
        u128 phase = 0;
        for (int i = 0; i < t->dim; ++i)
          phase += static_cast<u128>(static_cast<i128>(term.k[static_cast<std::size_t>(i)])) * t->x[i];
        v += term.a * std::cos(2.0 * std::numbers::pi * fixed_to_double(phase) + term.phase);
      }
      return v + offset_;
    }
    case PotentialKind::locally_constant: {
      const auto* s = std::get_if<ShiftPoint>(&x);
      if (!s) throw Error(ErrorKind::mismatched_variants, "locally constant potential needs a shift point");
      std::size_t idx = 0;
      for (int i = 0; i < lc_m_; ++i) idx = idx * static_cast<std::size_t>(lc_k_) + s->at(i);
      return lc_values_[idx] + offset_;
    }
    case PotentialKind::custom:
      return custom_(x) + offset_;
  }
  return offset_;
}

HolderCertificate certify_holder(const Potential& pot, const SystemModel& system, std::uint64_t seed,
                                 long long pairs) {
  HolderCertificate cert;
  cert.pairs = pairs;
  cert.sampled_sup = -std::numeric_limits<double>::infinity();
  cert.sampled_inf = std::numeric_limits<double>::infinity();
  const int window = std::max(24, pot.lc_memory() + 8);
  for (long long i = 0; i < pairs; ++i) {
    Rng rng(seed, 0x401de5, static_cast<std::uint64_t>(i));
    Point x = random_point(system, rng, window);
    Point y = x;
    if (auto* t = std::get_if<TorusPoint>(&y)) {
      const double scale = std::ldexp(1.0, -static_cast<int>(1 + rng.below(30)));
      std::vector<double> w(static_cast<std::size_t>(t->dim));
      for (auto& v : w) v = scale * rng.uniform(-1.0, 1.0);
      y = translate(*t, w);
    } else if (auto* s = std::get_if<ShiftPoint>(&y)) {
      const int from = static_cast<int>(rng.below(static_cast<std::uint64_t>(window)));
      for (int j = from; j < window; ++j)
        if (rng.below(2) == 0)
          s->sym[static_cast<std::size_t>(j)] =
              static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(system.symbols())));
    } else {
      y = random_point(system, rng);
    }
    const double fx = pot(x), fy = pot(y);
    cert.sampled_sup = std::max({cert.sampled_sup, fx, fy});
    cert.sampled_inf = std::min({cert.sampled_inf, fx, fy});
    const double d = system.distance(x, y);
    if (d <= 0) continue;
    cert.sampled_max_ratio =
        std::max(cert.sampled_max_ratio, std::abs(fx - fy) / std::pow(d, pot.holder_alpha()));
  }
  cert.ok = cert.sampled_max_ratio <= pot.holder_Q() * 1.01 + 1e-15 &&
            cert.sampled_sup <= pot.sup_bound() + 1e-12 && cert.sampled_inf >= pot.inf_bound() - 1e-12;
  return cert;
}

double birkhoff_sum(const SystemModel& system, const Observable& obs, const Point& x, long long n,
                    Direction dir) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "n must be non-negative");
  CompensatedSum sum;
  Point p = x;
  for (long long k = 0; k < n; ++k) {
    sum.add(obs(p));
    if (k + 1 < n) p = system.step(p, dir);
  }
  return sum.value();
}

double birkhoff_sum(const SystemModel& system, const Potential& pot, const Point& x, long long n,
                    Direction dir) {
  return birkhoff_sum(system, Observable([&pot](const Point& p) { return pot(p); }), x, n, dir);
}

std::vector<double> birkhoff_prefix(const SystemModel& system, const Observable& obs, const Point& x,
                                    long long n, Direction dir) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "n must be non-negative");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  out.push_back(0.0);
  CompensatedSum sum;
  Point p = x;
  for (long long k = 0; k < n; ++k) {
    sum.add(obs(p));
    out.push_back(sum.value());
    if (k + 1 < n) p = system.step(p, dir);
  }
  return out;
}

std::pair<double, double> oscillation(const Potential& pot, const SystemModel& system,
                                      const OscillationGrid& grid) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  auto visit = [&](const Point& p) {
    const double v = pot(p);
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  };
  switch (system.kind()) {
    case SystemKind::full_shift: {
      const int len = std::max({1, grid.word_length, pot.lc_memory()});
      const int k = system.symbols();
      std::vector<std::uint8_t> word(static_cast<std::size_t>(len), 0);
      for (;;) {
        visit(ShiftPoint{0, word});
        int i = len - 1;
        while (i >= 0 && word[static_cast<std::size_t>(i)] == k - 1) word[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++word[static_cast<std::size_t>(i)];
      }
      break;
    }
    case SystemKind::expanding_circle:
    case SystemKind::toral_auto: {
      if (grid.resolution < 1) throw Error(ErrorKind::empty_grid, "resolution must be positive");
      const int d = system.dim();
      std::vector<int> idx(static_cast<std::size_t>(d), 0);
      std::vector<double> c(static_cast<std::size_t>(d));
      for (;;) {
        for (int i = 0; i < d; ++i) c[i] = static_cast<double>(idx[i]) / grid.resolution;
        visit(torus_point(c));
        int i = d - 1;
        while (i >= 0 && idx[i] == grid.resolution - 1) idx[i--] = 0;
        if (i < 0) break;
        ++idx[i];
      }
      break;
    }
    case SystemKind::cocycle_toy:
      for (long long i = 0; i < system.toy_length(); ++i) visit(ToyPoint{i});
      break;
  }
  return {hi, lo};
}

}  // namespace ctlab

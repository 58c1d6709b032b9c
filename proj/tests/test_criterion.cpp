#include <cmath>

#include "ctlab/criterion.hpp"
#include "ctlab/rng.hpp"
#include "doctest.h"

using namespace ctlab;

namespace {

const std::vector<std::vector<long long>> kCat = {{2, 1}, {1, 1}};
const std::vector<std::vector<long long>> kCatId = {{2, 1, 0}, {1, 1, 0}, {0, 0, 1}};
const std::vector<std::vector<long long>> kT4 = {
    {1, -1, -1, 0}, {-1, 2, 1, -1}, {-1, 1, 2, 0}, {0, -1, 0, 2}};

std::vector<long long> range(long long a, long long b) {
  std::vector<long long> r;
  for (long long i = a; i <= b; ++i) r.push_back(i);
  return r;
}

ShiftPoint random_word(Rng& rng, long long len) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(len));
  for (auto& c : w) c = static_cast<std::uint8_t>(rng.below(2));
  return {0, w};
}

// Direct sum of the K series, long past the truncation point.
double k_reference(const BowenPropertyConfig& c) {
  long double s = 0;
  for (int k = 0; k < 200000; ++k)
    s += std::pow(std::exp(-k * c.r / 2) + std::exp(-k * c.r / 4), static_cast<long double>(c.alpha));
  return static_cast<double>(c.Q * std::pow(c.C * c.delta0, c.alpha) * s);
}

}  // namespace

TEST_CASE("K series truncation") {
  for (double r : {0.05, 0.1, 0.5}) {
    for (double alpha : {0.3, 1.0}) {
      BowenPropertyConfig c{1.7, 0.2, r, 0.9, alpha};
      const auto k = bowen_constant(c);
      CHECK(k.tail_bound < 1e-12);
      CHECK(k.K == doctest::Approx(k_reference(c)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(bowen_constant({1, 0.1, 0.0, 1, 1}), Error);
  CHECK_THROWS_AS(bowen_constant({1, 0.1, 0.1, 1, 1.5}), Error);
}

TEST_CASE("constant potentials have no distortion") {
  const auto cat = SystemModel::toral(kCat);
  Rng rng(21, 1);
  std::vector<Segment> segs;
  for (int i = 0; i < 10; ++i) segs.push_back({random_point(cat, rng), 1 + static_cast<long long>(rng.below(50))});
  const auto rep = bowen_property_check(cat, Potential::constant(1.3), segs, 0.1, {});
  CHECK(rep.samples > 0);
  CHECK(rep.empirical_sup == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.holds);
}

TEST_CASE("2-shift distortion matches exact enumeration") {
  // d < 0.3 forces agreement on positions 0..n-1, so only the last term of a
  // two-symbol potential can move.
  const auto shift = SystemModel::full_shift(2);
  const auto pot = Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25});
  auto v = [&](std::uint8_t a, std::uint8_t b) { return pot(ShiftPoint{0, {a, b}}); };
  Rng rng(22, 1);
  BallSampling bs;
  bs.samples = 32;
  double oracle_max = 0.0;
  BowenReport total;
  for (int i = 0; i < 40; ++i) {
    const long long n = 1 + static_cast<long long>(rng.below(12));
    const auto x = random_word(rng, n + 4);
    const auto a = x.at(static_cast<int>(n - 1)), b = x.at(static_cast<int>(n));
    const double exact = std::max(std::abs(v(a, b) - v(a, 0)), std::abs(v(a, b) - v(a, 1)));
    const auto rep = bowen_property_check(shift, pot, {{x, n}}, 0.3, {1, 0.3, 0.1, 1, 1}, bs);
    REQUIRE(rep.samples > 0);
    CHECK(rep.empirical_sup <= exact + 1e-12);
    CHECK(rep.empirical_sup == doctest::Approx(exact).epsilon(1e-12));
    oracle_max = std::max(oracle_max, exact);
  }
  CHECK(oracle_max > 0);
}

TEST_CASE("T4 distortion stays flat in n and under K") {
  const auto t4 = SystemModel::toral(kT4);
  const auto pot = Potential::trig({{0.1, {1, 0, 0, 0}, 0.0}, {0.05, {0, 1, 1, 0}, 0.3}});
  const double eps = 0.05;
  Rng rng(23, 1);
  std::vector<Segment> segs;
  for (long long n = 1; n <= 200; n += 3) segs.push_back({random_point(t4, rng), n});
  BowenPropertyConfig c{t4.condition_number(), eps, 0.1, pot.holder_Q(), pot.holder_alpha()};
  BallSampling bs;
  bs.samples = 4;
  bs.max_rung = 12;
  const auto rep = bowen_property_check(t4, pot, segs, eps, c, bs, nullptr, 4);
  CHECK(rep.samples > 0);
  CHECK(rep.empirical_sup > 0);
  CHECK(rep.holds);
  CHECK(rep.sup_over(101, 200) <= 1.1 * rep.sup_over(1, 100));
  // Segments outside G are skipped when observables are given.
  const auto obs = central_observables(t4, 1);
  const auto skip = bowen_property_check(t4, pot, segs, eps, {0.1, 0.1, 1.0, 1, 1}, bs, &obs);
  CHECK(skip.skipped_not_in_G == static_cast<long long>(segs.size()));
  CHECK(skip.records.empty());
}

TEST_CASE("2-shift specification concatenates words") {
  const auto shift = SystemModel::full_shift(2);
  const std::vector<Segment> segs{{ShiftPoint{0, {0, 1, 0, 1, 1, 1}}, 4}, {ShiftPoint{0, {1, 1, 0, 0}}, 4}};
  const auto res = specification_search(shift, segs, 0.01);
  REQUIRE(res.ok);
  const auto& y = std::get<ShiftPoint>(res.y);
  CHECK(y.lo == 0);
  CHECK(y.sym == std::vector<std::uint8_t>{0, 1, 0, 1, 1, 1, 0, 0});
  CHECK(res.gaps == std::vector<long long>{0});
  CHECK(res.starts == std::vector<long long>{0, 4});
  for (double d : res.distances) CHECK(d == 0.0);
  CHECK_THROWS_AS(specification_search(shift.inverse(), segs, 0.01), Error);
}

TEST_CASE("cat map specification within the predicted gap") {
  const auto cat = SystemModel::toral(kCat);
  const double delta = 0.05;
  const double lu = cat.bundle("u").log_rate;
  const auto predicted = static_cast<long long>(std::ceil(std::log(4 / delta) / lu));
  Rng rng(24, 1);
  long long worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Segment a{random_point(cat, rng), 1 + static_cast<long long>(rng.below(20))};
    const Segment b{random_point(cat, rng), 1 + static_cast<long long>(rng.below(20))};
    const auto res = specification_search(cat, {a, b}, delta);
    REQUIRE(res.ok);
    CHECK(res.predicted_gap == predicted);
    REQUIRE(res.gaps.size() == 1);
    CHECK(res.starts[1] == a.n + res.gaps[0]);
    // Independent check of the glued orbit.
    CHECK(bowen_distance(cat, res.y, a.x, a.n) < delta);
    CHECK(bowen_distance(cat, cat.iterate(res.y, res.starts[1]), b.x, b.n) < delta);
    worst = std::max(worst, res.gaps[0]);
  }
  CHECK(worst <= predicted);
  MESSAGE("largest cat gap " << worst << ", predicted " << predicted);

  // Three segments on T4.
  const auto t4 = SystemModel::toral(kT4);
  std::vector<Segment> segs;
  for (int i = 0; i < 3; ++i) segs.push_back({random_point(t4, rng), 3 + static_cast<long long>(rng.below(8))});
  const auto r4 = specification_search(t4, segs, 0.05);
  CHECK(r4.ok);
  CHECK(r4.gaps.size() == 2);

  const auto single = specification_search(cat, {{random_point(cat, rng), 7}}, delta);
  CHECK(single.ok);
  CHECK(single.gaps.empty());
  CHECK(single.distances.at(0) == 0.0);
  CHECK_THROWS_AS(specification_search(SystemModel::toral(kCatId, std::nullopt, {}, true), segs, 0.05), Error);
  CHECK_THROWS_AS(specification_search(cat, {}, 0.05), Error);
}

TEST_CASE("expansivity windows") {
  const auto cat = SystemModel::toral(kCat);
  const auto catid = SystemModel::toral(kCatId, std::nullopt, {}, true);
  const auto t4 = SystemModel::toral(kT4);
  Rng rng(25, 1);
  const Point x = random_point(cat, rng);
  CHECK(expansivity_window(cat, x, 0.0, 5) == 0.0);
  const double lu = std::exp(cat.bundle("u").log_rate);
  for (long long N = 5; N < 14; ++N) {
    const double a = expansivity_window(cat, x, 0.1, N), b = expansivity_window(cat, x, 0.1, N + 1);
    CHECK(b / a <= 1 / lu + 0.05);
    CHECK(b <= a);
    CHECK(expansivity_window(cat, x, 0.05, N) <= a);
  }
  const Point y = random_point(t4, rng);
  double l2 = 0, l3 = 0;
  for (const auto& bnd : t4.splitting()) {
    if (bnd.label == "c1") l2 = std::abs(bnd.eigenvalue);
    if (bnd.label == "c2") l3 = std::abs(bnd.eigenvalue);
  }
  for (long long N = 5; N < 14; ++N)
    CHECK(expansivity_window(t4, y, 0.1, N + 1) / expansivity_window(t4, y, 0.1, N) <=
          std::max(l2, 1 / l3) + 0.05);
  // The neutral circle never shrinks.
  const Point z = random_point(catid, rng);
  for (long long N : {1, 5, 20}) CHECK(expansivity_window(catid, z, 0.1, N) == doctest::Approx(0.2).epsilon(1e-9));

  const auto shift = SystemModel::full_shift(2);
  const ShiftPoint s{-4, {0, 1, 1, 0, 1, 0, 0, 1}};
  CHECK(expansivity_window(shift, s, 0.45, 3) == std::ldexp(1.0, -5));
  CHECK(expansivity_window(shift, s, 0.5, 3) == std::ldexp(1.0, -4));
  CHECK(expansivity_window(shift, s, 0.0, 3) == 0.0);
  CHECK_THROWS_AS(expansivity_window(SystemModel::expanding_circle(2), x, 0.1, 3), Error);
  CHECK_THROWS_AS(expansivity_window(cat, x, 0.1, 0), Error);
}

TEST_CASE("non-expansive seeds") {
  PexpOptions o;
  o.seeds = 4;
  o.N = 10;
  o.pressure.grid.patch_cells = 2;
  o.delta = 0.1;
  CHECK(pexp_obstruction_estimate(SystemModel::toral(kCat), Potential::zero(), 0.1, o).empty);
  CHECK(pexp_obstruction_estimate(SystemModel::toral(kT4), Potential::zero(), 0.1, o).empty);
  const auto rep = pexp_obstruction_estimate(SystemModel::toral(kCatId, std::nullopt, {}, true), Potential::zero(), 0.1, o);
  CHECK_FALSE(rep.empty);
  for (const auto& s : rep.seeds) CHECK(s.flagged);
  REQUIRE(rep.pressure.has_value());
  CHECK(rep.pressure->bracket().hi > 0);
}

TEST_CASE("ct report verdicts") {
  SUBCASE("2-shift passes at eps > 2000 delta") {
    CTConfig c;
    c.delta = 2e-4;
    c.eps = 0.45;
    c.a_param = 0.1;
    c.spec_pairs = 20;
    c.bowen_segments = 10;
    c.pexp.seeds = 2;
    c.workers = 2;
    const auto pot = Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25});
    const auto rep = ct_report(SystemModel::full_shift(2), pot, c);
    CHECK(rep.scale_ok);
    CHECK(rep.trivial_decomposition);
    CHECK(rep.bad_empty);
    CHECK(rep.bad_pressure_verdict() == Verdict::pass);
    CHECK(rep.bowen_verdict() == Verdict::pass);
    CHECK(rep.specification_verdict() == Verdict::pass);
    CHECK(rep.expansivity_verdict() == Verdict::pass);
    CHECK(rep.all_pass());

    c.eps = 1000 * c.delta;
    const auto withheld = ct_report(SystemModel::full_shift(2), pot, c);
    CHECK_FALSE(withheld.scale_ok);
    CHECK_FALSE(withheld.all_pass());
  }
  SUBCASE("T4 has no bad segments at small r") {
    CTConfig c;
    c.delta = 0.1;
    c.eps = 0.2;
    c.r = 0.1;
    c.a_param = 0.5;
    c.pressure.grid.patch_cells = 2;
    c.spec_pairs = 10;
    c.spec_max_n = 8;
    c.bowen_segments = 5;
    c.pexp.seeds = 2;
    c.workers = 4;
    const auto rep = ct_report(SystemModel::toral(kT4), Potential::zero(), c);
    CHECK_FALSE(rep.trivial_decomposition);
    CHECK(rep.bad_empty);
    CHECK_FALSE(rep.scale_ok);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.spec_success_rate == 1.0);
    CHECK(rep.expansivity_verdict() == Verdict::pass);
  }
}

#include <cmath>
#include <vector>

#include "ctlab/rng.hpp"
#include "ctlab/systems.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ctlab;

namespace {

const std::vector<std::vector<long long>> kCat = {{2, 1}, {1, 1}};
const std::vector<std::vector<long long>> kT4 = {
    {1, -1, -1, 0}, {-1, 2, 1, -1}, {-1, 1, 2, 0}, {0, -1, 0, 2}};

ShiftPoint word(int lo, std::vector<int> s) {
  ShiftPoint p;
  p.lo = lo;
  for (int v : s) p.sym.push_back(static_cast<std::uint8_t>(v));
  return p;
}

}  // namespace

TEST_CASE("toral step fixes the origin") {
  const auto cat = SystemModel::toral(kCat);
  const std::vector<double> zero{0.0, 0.0};
  const Point p = torus_point(zero);
  CHECK(compare(cat.step(p), p) == 0);
}

TEST_CASE("doubling map sends 1/4 to 1/2") {
  const auto dbl = SystemModel::expanding_circle(2);
  const std::vector<double> q{0.25};
  const auto img = std::get<TorusPoint>(dbl.step(torus_point(q)));
  CHECK(coordinates(img)[0] == 0.5);
}

TEST_CASE("doubling map has no backward step") {
  const auto dbl = SystemModel::expanding_circle(2);
  const std::vector<double> q{0.25};
  try {
    dbl.step(torus_point(q), Direction::backward);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_direction);
  }
}

TEST_CASE("shift forward moves the origin one step left and back") {
  const auto sh = SystemModel::full_shift(2);
  const ShiftPoint x = word(-2, {0, 1, 0, 1, 1});
  const auto y = std::get<ShiftPoint>(sh.step(x));
  CHECK(y.at(0) == x.at(1));
  CHECK(y.at(-1) == x.at(0));
  CHECK(std::get<ShiftPoint>(sh.step(y, Direction::backward)) == x);
}

TEST_CASE("torus distance wraps around") {
  const auto cat = SystemModel::toral(kCat);
  const std::vector<double> a{0.1, 0.1}, b{0.9, 0.1};
  CHECK(cat.distance(torus_point(a), torus_point(b)) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cat.distance(torus_point(a), torus_point(a)) == 0.0);
}

TEST_CASE("shift distance from the first disagreement") {
  const auto sh = SystemModel::full_shift(2);
  // Agree on |i| <= 3, differ at i = 4. With d = 2^-(m+1), m = 4.
  ShiftPoint x = word(-6, std::vector<int>(13, 0));
  ShiftPoint y = x;
  y.sym[static_cast<std::size_t>(4 + 6)] = 1;
  CHECK(sh.distance(x, y) == std::ldexp(1.0, -5));
  CHECK(sh.distance(x, x) == 0.0);
  ShiftPoint z = x;
  z.sym[static_cast<std::size_t>(6)] = 1;
  CHECK(sh.distance(x, z) == 0.5);
}

TEST_CASE("mismatched variants are rejected") {
  const auto sh = SystemModel::full_shift(2);
  const std::vector<double> c{0.1, 0.2};
  try {
    sh.distance(word(0, {0, 1}), torus_point(c));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::mismatched_variants);
  }
}

TEST_CASE("cat map unstable log-norm matches the characteristic polynomial") {
  const auto roots = oracle::real_roots(oracle::char_poly(kCat));
  REQUIRE(roots.size() == 2);
  const double lu = std::log(roots[1]);
  const auto cat = SystemModel::toral(kCat);
  Rng rng(7, 1);
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(cat, rng);
    CHECK(cat.bundle_log_norm(p, "u") == doctest::Approx(lu).epsilon(1e-12));
    CHECK(cat.bundle_log_norm(p, "u", Direction::backward) == doctest::Approx(-lu).epsilon(1e-12));
  }
  CHECK(lu == doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-12));
}

TEST_CASE("T4 model spectrum matches the characteristic polynomial") {
  const auto roots = oracle::real_roots(oracle::char_poly(kT4));
  REQUIRE(roots.size() == 4);
  CHECK(roots[0] > 0);
  CHECK(roots[1] < 1);
  CHECK(roots[2] > 1);
  const auto t4 = SystemModel::toral(kT4);
  const std::vector<std::string> labels{"s", "c1", "c2", "u"};
  for (int i = 0; i < 4; ++i) {
    CHECK(t4.splitting()[i].label == labels[i]);
    CHECK(t4.splitting()[i].eigenvalue == doctest::Approx(roots[i]).epsilon(1e-10));
  }
  double sum = 0;
  for (const auto& b : t4.splitting()) sum += b.log_rate;
  CHECK(std::abs(sum) <= 1e-9);
  REQUIRE(t4.xi().has_value());
  CHECK(*t4.xi() >= std::max(roots[0], 1 / roots[3]));
  CHECK(*t4.xi() < 1);
}

TEST_CASE("toral constructor rejects non-hyperbolic or non-unimodular matrices") {
  CHECK_THROWS_AS(SystemModel::toral({{2, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(SystemModel::toral({{1, 1}, {0, 1}}), Error);
  CHECK_THROWS_AS(SystemModel::toral({{0, -1}, {1, 0}}), Error);
  CHECK_NOTHROW(SystemModel::toral({{2, 1, 0}, {1, 1, 0}, {0, 0, 1}}, std::nullopt, {}, true));
}

TEST_CASE("toy bundle values are the prescribed sequence") {
  const auto toy = SystemModel::cocycle_toy({{"c1", {std::vector<double>(10, -0.3), {}}}});
  for (long long i = 0; i < 10; ++i) CHECK(toy.bundle_log_norm(ToyPoint{i}, "c1") == -0.3);
  CHECK(toy.bundle_log_norm(ToyPoint{3}, "c1", Direction::backward) == 0.3);
  try {
    toy.bundle_log_norm(ToyPoint{10}, "c1");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_window);
  }
  CHECK_THROWS_AS(toy.bundle_log_norm(ToyPoint{1}, "c9"), Error);
}

TEST_CASE("shift has no smooth structure") {
  const auto sh = SystemModel::full_shift(2);
  try {
    sh.bundle_log_norm(word(0, {0}), "u");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_smooth_structure);
  }
}

TEST_CASE("forward then backward is the identity on 10^4 points") {
  const auto t4 = SystemModel::toral(kT4);
  const auto cat = SystemModel::toral(kCat);
  const auto sh = SystemModel::full_shift(3);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Rng rng(11, 2, i);
    for (const auto* s : {&t4, &cat, &sh}) {
      const Point p = random_point(*s, rng, 16);
      CHECK_MESSAGE(compare(s->step(s->step(p), Direction::backward), p) == 0, "index ", i);
      CHECK(compare(s->step(s->step(p, Direction::backward)), p) == 0);
    }
  }
}

TEST_CASE("triangle inequality on 10^4 triples") {
  const auto t4 = SystemModel::toral(kT4);
  const auto sh = SystemModel::full_shift(2);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Rng rng(12, 3, i);
    for (const auto* s : {&t4, &sh}) {
      const Point a = random_point(*s, rng, 12), b = random_point(*s, rng, 12), c = random_point(*s, rng, 12);
      CHECK(s->distance(a, c) <= s->distance(a, b) + s->distance(b, c) + 1e-12);
      CHECK(s->distance(a, b) == s->distance(b, a));
    }
  }
}

TEST_CASE("toral bundle log-norms do not depend on the point") {
  const auto t4 = SystemModel::toral(kT4);
  for (const auto& b : t4.splitting()) {
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      Rng rng(13, 4, i);
      const double v = t4.bundle_log_norm(random_point(t4, rng), b.label);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo == 0.0);
  }
}

TEST_CASE("inverse toral system swaps the roles of the bundles") {
  const auto t4 = SystemModel::toral(kT4);
  const auto inv = t4.inverse();
  for (int i = 0; i < 4; ++i)
    CHECK(inv.splitting()[i].log_rate == doctest::Approx(-t4.splitting()[3 - i].log_rate).epsilon(1e-12));
  Rng rng(14, 5);
  const Point p = random_point(t4, rng);
  CHECK(compare(inv.step(t4.step(p)), p) == 0);
}

TEST_CASE("fixed-point conversions") {
  CHECK(fixed_to_double(fixed_from_double(0.375)) == 0.375);
  CHECK(fixed_to_double(fixed_from_double(-0.25)) == 0.75);
  CHECK(fixed_signed_to_double(fixed_from_double(-1e-30)) == doctest::Approx(-1e-30).epsilon(1e-6));
  CHECK(fixed_to_double(fixed_from_double(1.0)) == 0.0);
}

#include <cmath>

#include "ctlab/bowen.hpp"
#include "ctlab/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ctlab;

namespace {

const std::vector<std::vector<long long>> kCat = {{2, 1}, {1, 1}};

ShiftPoint zeros(int lo, int hi) { return ShiftPoint{lo, std::vector<std::uint8_t>(static_cast<std::size_t>(hi - lo), 0)}; }

}  // namespace

TEST_CASE("Bowen distance basics") {
  const auto cat = SystemModel::toral(kCat);
  Rng rng(1, 1);
  const Point x = random_point(cat, rng), y = random_point(cat, rng);
  CHECK(bowen_distance(cat, x, y, 1) == cat.distance(x, y));
  CHECK(bowen_distance(cat, x, x, 17) == 0.0);
  CHECK_THROWS_AS(bowen_distance(cat, x, y, 0), Error);
}

TEST_CASE("shift Bowen distance by direct enumeration") {
  const auto sh = SystemModel::full_shift(2);
  // Equal on [-10, 10]; differ at -11 and 11.
  ShiftPoint x = zeros(-12, 13), y = x;
  y.sym[static_cast<std::size_t>(11 + 12)] = 1;
  y.sym[static_cast<std::size_t>(-11 + 12)] = 1;
  double enumerated = 0;
  for (int i = 0; i < 5; ++i) enumerated = std::max(enumerated, sh.distance(sh.iterate(x, i), sh.iterate(y, i)));
  CHECK(enumerated == std::ldexp(1.0, -8));
  CHECK(bowen_distance(sh, x, y, 5) == enumerated);
  // The inverse shift walks the other way.
  const auto inv = sh.inverse();
  double back = 0;
  for (int i = 0; i < 5; ++i) back = std::max(back, inv.distance(inv.iterate(x, i), inv.iterate(y, i)));
  CHECK(bowen_distance(inv, x, y, 5) == back);
}

TEST_CASE("Bowen distance fast paths match step-by-step enumeration") {
  const auto sh = SystemModel::full_shift(3);
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(2, 1, i);
    ShiftPoint x = std::get<ShiftPoint>(random_point(sh, rng, 40));
    ShiftPoint y = x;
    for (int j = 0; j < 3; ++j) y.sym[rng.below(40)] = static_cast<std::uint8_t>(rng.below(3));
    x.lo = y.lo = -20;
    const long long n = 1 + static_cast<long long>(rng.below(15));
    for (const auto& s : {sh, sh.inverse()}) {
      double ref = 0;
      for (long long k = 0; k < n; ++k) ref = std::max(ref, s.distance(s.iterate(x, k), s.iterate(y, k)));
      CHECK(bowen_distance(s, x, y, n) == ref);
    }
  }
}

TEST_CASE("Bowen balls are open") {
  const auto cat = SystemModel::toral(kCat);
  Rng rng(3, 1);
  const Point x = random_point(cat, rng), y = random_point(cat, rng);
  CHECK(in_bowen_ball(cat, x, x, 5, 1e-9));
  const double d = bowen_distance(cat, x, y, 3);
  CHECK_FALSE(in_bowen_ball(cat, x, y, 3, d));
  CHECK(in_bowen_ball(cat, x, y, 3, std::nextafter(d, 1.0)));
}

TEST_CASE("stable displacements stay in the Bowen ball") {
  const auto cat = SystemModel::toral(kCat);
  const double delta = 0.05;
  Rng rng(4, 1);
  const auto x = std::get<TorusPoint>(random_point(cat, rng));
  const auto& es = cat.bundle("s").direction;
  const std::vector<double> w{0.9 * delta * es[0], 0.9 * delta * es[1]};
  CHECK(in_bowen_ball(cat, x, translate(x, w), 30, delta));
  const auto& eu = cat.bundle("u").direction;
  const std::vector<double> v{0.9 * delta * eu[0], 0.9 * delta * eu[1]};
  CHECK_FALSE(in_bowen_ball(cat, x, translate(x, v), 30, delta));
}

TEST_CASE("full 2-shift separated set at delta 0.4 has 2^n members") {
  const auto sh = SystemModel::full_shift(2);
  for (long long n = 1; n <= 8; ++n) {
    const auto set = build_separated_set(sh, Potential::zero(), n, 0.4, {});
    CHECK(set.points.size() == (std::size_t{1} << n));
    CHECK(verify_separated(sh, set));
    CHECK(set.construction.max_cover_distance <= 0.4);
  }
}

TEST_CASE("a scale above the diameter keeps a single point") {
  const auto cat = SystemModel::toral(kCat);
  const auto pts = make_grid(cat, 1, 0.05, {}).points;
  std::vector<double> w(pts.size(), 0.0);
  const auto set = greedy_separated(cat, pts, w, 1, cat.ambient_diameter() + 0.1);
  CHECK(set.points.size() == 1);
  const auto sh = SystemModel::full_shift(2);
  CHECK(build_separated_set(sh, Potential::zero(), 1, 0.6, {}).points.size() == 1);
}

TEST_CASE("doubling map at delta 0.3, n = 3 against a naive greedy") {
  const auto dbl = SystemModel::expanding_circle(2);
  const double delta = 0.3;
  const long long n = 3;
  const auto grid = make_grid(dbl, n, 0.5 * delta, {});
  std::vector<double> w(grid.points.size(), 0.0);
  const auto set = greedy_separated(dbl, grid.points, w, n, delta);

  std::vector<double> xs;
  for (const auto& p : grid.points) xs.push_back(coordinates(std::get<TorusPoint>(p))[0]);
  auto circle = [](double a, double b) {
    double d = std::fmod(std::abs(a - b), 1.0);
    return std::min(d, 1 - d);
  };
  auto dn = [&](std::size_t i, std::size_t j) {
    double a = xs[i], b = xs[j], d = 0;
    for (long long k = 0; k < n; ++k) {
      d = std::max(d, circle(a, b));
      a = std::fmod(2 * a, 1.0);
      b = std::fmod(2 * b, 1.0);
    }
    return d;
  };
  const auto ref = oracle::naive_greedy(xs.size(), w, [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; }, dn, delta);
  CHECK(set.points.size() == ref.size());
  CHECK(set.points.size() >= 8);  // the eight dyadic branch points are separated
  CHECK(verify_separated(dbl, set));
}

TEST_CASE("greedy matches the naive reference on the cat map") {
  const auto cat = SystemModel::toral(kCat);
  for (long long n : {1, 2, 3, 4}) {
    GridSpec spec;
    spec.patch_cells = 3;
    spec.contracting_points = 3;
    const auto grid = make_grid(cat, n, 0.05, spec);
    std::vector<double> w(grid.points.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i % 7);
    const auto set = greedy_separated(cat, grid.points, w, n, 0.1);
    CHECK(set.construction.index == std::string("eigen-coordinate cells"));
    auto dn = [&](std::size_t i, std::size_t j) { return bowen_distance(cat, grid.points[i], grid.points[j], n); };
    const auto ref = oracle::naive_greedy(
        grid.points.size(), w, [&](std::size_t i, std::size_t j) { return compare(grid.points[i], grid.points[j]) < 0; },
        dn, 0.1);
    REQUIRE(ref.size() == set.points.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(compare(grid.points[ref[i]], set.points[i]) == 0);
  }
}

TEST_CASE("phi_eps examples") {
  const auto dbl = SystemModel::expanding_circle(2);
  const auto ident = Potential::custom(
      "identity", [](const Point& p) { return coordinates(std::get<TorusPoint>(p))[0]; }, 1.0, 1.0, 1.0, 0.0);
  const std::vector<double> c{0.2};
  const Point x = torus_point(c);
  const double phi0 = birkhoff_sum(dbl, ident, x, 2);
  CHECK(phi_eps(dbl, ident, x, 2, 0.0, {}) == phi0);
  const double lb = phi_eps(dbl, ident, x, 2, 0.05, {});
  CHECK(lb >= phi0);
  CHECK(lb <= phi0 + 2 * 1.0 * 0.05);
  CHECK(lb > phi0);
  const auto cat = SystemModel::toral(kCat);
  Rng rng(5, 1);
  const Point y = random_point(cat, rng);
  CHECK(phi_eps(cat, Potential::constant(0.3), y, 6, 0.1, {}) == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("Bowen metric grows with n and balls shrink") {
  const auto cat = SystemModel::toral(kCat);
  const auto sh = SystemModel::full_shift(2);
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(6, 1, i);
    const Point x = random_point(cat, rng);
    std::vector<double> w{rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01)};
    const Point y = translate(std::get<TorusPoint>(x), w);
    const ShiftPoint a = std::get<ShiftPoint>(random_point(sh, rng, 24));
    ShiftPoint b = a;
    b.sym[rng.below(24)] ^= 1;
    for (long long n = 1; n < 12; ++n) {
      CHECK(bowen_distance(cat, x, y, n + 1) >= bowen_distance(cat, x, y, n));
      CHECK(bowen_distance(sh, a, b, n + 1) >= bowen_distance(sh, a, b, n));
      if (in_bowen_ball(cat, x, y, n + 1, 0.05)) CHECK(in_bowen_ball(cat, x, y, n, 0.05));
    }
  }
}

TEST_CASE("doubling the scale never enlarges the separated set") {
  const auto cat = SystemModel::toral(kCat);
  const auto sh = SystemModel::full_shift(2);
  const auto lc = Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25});
  GridSpec spec;
  spec.patch_cells = 4;
  spec.contracting_points = 3;
  for (long long n : {2, 4, 6}) {
    const auto grid = make_grid(cat, n, 0.02, spec);
    std::vector<double> w(grid.points.size(), 0.0);
    const auto a = greedy_separated(cat, grid.points, w, n, 0.04);
    const auto b = greedy_separated(cat, grid.points, w, n, 0.08);
    CHECK(b.points.size() <= a.points.size());
    const auto sg = make_grid(sh, n, 0.05, {}, 2);
    std::vector<double> lw;
    for (const auto& p : sg.points) lw.push_back(birkhoff_sum(sh, lc, p, n));
    const auto s1 = greedy_separated(sh, sg.points, lw, n, 0.1);
    const auto s2 = greedy_separated(sh, sg.points, lw, n, 0.2);
    CHECK(s2.log_sum() <= s1.log_sum());
    CHECK(s2.points.size() <= s1.points.size());
  }
}

TEST_CASE("larger eps never lowers the shift partition sum") {
  const auto sh = SystemModel::full_shift(2);
  const auto lc = Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25});
  const long long n = 5;
  const auto grid = make_grid(sh, n, 0.1, {}, 2);
  double prev = -1e300;
  for (double eps : {0.0, 0.03, 0.07, 0.15, 0.3}) {
    std::vector<double> lw;
    for (const auto& p : grid.points) lw.push_back(phi_eps(sh, lc, p, n, eps, {}));
    const double s = greedy_separated(sh, grid.points, lw, n, 0.2).log_sum();
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("shift phi_eps for a locally constant potential equals the ball maximum") {
  const auto sh = SystemModel::full_shift(2);
  const auto pot = Potential::locally_constant(2, 3, {0.1, -0.4, 0.3, 0.25, 0.9, -0.2, 0.0, 0.45});
  Rng rng(31, 1);
  for (int t = 0; t < 30; ++t) {
    const long long n = 1 + static_cast<long long>(rng.below(5));
    const int len = static_cast<int>(n) + 6;
    ShiftPoint x{-2, std::vector<std::uint8_t>(static_cast<std::size_t>(len))};
    for (auto& c : x.sym) c = static_cast<std::uint8_t>(rng.below(2));
    for (double eps : {0.1, 0.2, 0.3, 0.6}) {
      double brute = -1e300;
      for (long long w = 0; w < (1LL << len); ++w) {
        ShiftPoint y = x;
        for (int i = 0; i < len; ++i) y.sym[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((w >> i) & 1);
        if (in_bowen_ball(sh, x, y, n, eps)) brute = std::max(brute, birkhoff_sum(sh, pot, y, n));
      }
      CHECK(phi_eps(sh, pot, x, n, eps, {}) == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

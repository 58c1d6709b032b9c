#include <cmath>
#include <numbers>

#include "ctlab/potentials.hpp"
#include "ctlab/rng.hpp"
#include "doctest.h"

using namespace ctlab;

namespace {

const std::vector<std::vector<long long>> kT4 = {
    {1, -1, -1, 0}, {-1, 2, 1, -1}, {-1, 1, 2, 0}, {0, -1, 0, 2}};

Potential t4_trig() {
  return Potential::trig({{0.1, {1, 0, 0, 0}, 0.0}, {0.05, {0, 1, -1, 0}, 0.3}});
}

}  // namespace

TEST_CASE("Birkhoff sums of constants") {
  const auto cat = SystemModel::toral({{2, 1}, {1, 1}});
  Rng rng(1, 1);
  const Point x = random_point(cat, rng);
  CHECK(birkhoff_sum(cat, Potential::zero(), x, 10) == 0.0);
  CHECK(birkhoff_sum(cat, Potential::constant(0.7), x, 5) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(birkhoff_sum(cat, Potential::constant(0.7), x, 0) == 0.0);
}

TEST_CASE("cat map unstable log-norm sums to n log lambda") {
  const auto cat = SystemModel::toral({{2, 1}, {1, 1}});
  Rng rng(2, 1);
  const Point x = random_point(cat, rng);
  const Observable phi_u = [&](const Point& p) { return cat.bundle_log_norm(p, "u"); };
  CHECK(birkhoff_sum(cat, phi_u, x, 7) ==
        doctest::Approx(7 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-13));
}

TEST_CASE("oscillation examples") {
  const auto cat = SystemModel::toral({{2, 1}, {1, 1}});
  auto [hi0, lo0] = oscillation(Potential::zero(), cat, {16});
  CHECK(hi0 == 0.0);
  CHECK(lo0 == 0.0);

  const auto cosine = Potential::trig({{0.1, {1, 0}, 0.0}});
  double ref_hi = -1, ref_lo = 1;
  for (int i = 0; i < 256; ++i) {
    const double v = 0.1 * std::cos(2 * std::numbers::pi * i / 256.0);
    ref_hi = std::max(ref_hi, v);
    ref_lo = std::min(ref_lo, v);
  }
  auto [hi, lo] = oscillation(cosine, cat, {256});
  CHECK(std::abs(hi - ref_hi) <= 1e-3);
  CHECK(std::abs(lo - ref_lo) <= 1e-3);
  CHECK(lo >= cosine.inf_bound());
  CHECK(hi <= cosine.sup_bound());

  const auto sh = SystemModel::full_shift(2);
  const auto lc = Potential::locally_constant(2, 1, {0.2, 0.5});
  auto [hs, ls] = oscillation(lc, sh, {});
  CHECK(hs == 0.5);
  CHECK(ls == 0.2);
}

TEST_CASE("cocycle identity on 10^3 triples") {
  const auto t4 = SystemModel::toral(kT4);
  const auto phi = t4_trig();
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(3, 2, i);
    const Point x = random_point(t4, rng);
    const long long m = static_cast<long long>(rng.below(40)), n = static_cast<long long>(rng.below(40));
    const double lhs = birkhoff_sum(t4, phi, x, m + n);
    const double rhs = birkhoff_sum(t4, phi, x, m) + birkhoff_sum(t4, phi, t4.iterate(x, m), n);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("backward sums are forward sums of the inverse system") {
  const auto t4 = SystemModel::toral(kT4);
  const auto inv = t4.inverse();
  const auto phi = t4_trig();
  const auto sh = SystemModel::full_shift(2);
  const auto lc = Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25});
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(4, 2, i);
    const Point x = random_point(t4, rng);
    CHECK(birkhoff_sum(t4, phi, x, 25, Direction::backward) == birkhoff_sum(inv, phi, x, 25));
    ShiftPoint s = std::get<ShiftPoint>(random_point(sh, rng, 60));
    s.lo = -40;
    CHECK(birkhoff_sum(sh, lc, s, 30, Direction::backward) == birkhoff_sum(sh.inverse(), lc, s, 30));
  }
}

TEST_CASE("prefix sums agree with fresh sums bit for bit") {
  const auto t4 = SystemModel::toral(kT4);
  const auto phi = t4_trig();
  const Observable obs = [&](const Point& p) { return phi(p); };
  Rng rng(5, 1);
  const Point x = random_point(t4, rng);
  const auto pre = birkhoff_prefix(t4, obs, x, 60);
  for (long long k = 0; k <= 60; ++k) CHECK(pre[static_cast<std::size_t>(k)] == birkhoff_sum(t4, obs, x, k));
}

TEST_CASE("Hölder certification") {
  const auto t4 = SystemModel::toral(kT4);
  CHECK(certify_holder(t4_trig(), t4, 9).ok);
  const auto sh = SystemModel::full_shift(2);
  CHECK(certify_holder(Potential::locally_constant(2, 2, {0.1, -0.4, 0.3, 0.25}), sh, 9).ok);
  CHECK_FALSE(certify_holder(t4_trig().with_holder(0.1, 1.0), t4, 9).ok);
  const auto c = certify_holder(Potential::zero(), t4, 9, 100);
  CHECK(c.ok);
  CHECK(c.sampled_max_ratio == 0.0);
}

TEST_CASE("shifted potentials") {
  const auto p = t4_trig().shifted(0.25);
  const auto t4 = SystemModel::toral(kT4);
  Rng rng(6, 1);
  const Point x = random_point(t4, rng);
  CHECK(p(x) == t4_trig()(x) + 0.25);
  CHECK(p.sup_bound() == doctest::Approx(0.4));
}

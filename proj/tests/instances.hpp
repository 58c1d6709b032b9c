#pragma once

// Random model instances shared by the unit tests and the acceptance run.

#include <cmath>

#include "ctlab/decomposition.hpp"
#include "ctlab/rng.hpp"

namespace instances {

// Two central bundles with bounded random sequences. Forward values of c1
// and backward values of c2 are drawn from [lo, hi].
inline ctlab::SystemModel random_toy(ctlab::Rng& rng, long long len, double lo, double hi) {
  std::vector<double> f1(static_cast<std::size_t>(len)), b1(f1.size()), f2(f1.size()), b2(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    f1[i] = rng.uniform(lo, hi);
    b1[i] = -f1[i];
    b2[i] = rng.uniform(lo, hi);
    f2[i] = -b2[i];
  }
  return ctlab::SystemModel::cocycle_toy({{"c1", {f1, b1}}, {"c2", {f2, b2}}});
}

// Slowly varying sequences: a random walk with steps in [-step, step],
// reflected into [lo, hi]. Nearby indices carry nearby values, so the
// continuity modulus is nontrivial.
inline ctlab::SystemModel smooth_toy(ctlab::Rng& rng, long long len, double lo, double hi, double step) {
  auto walk = [&] {
    std::vector<double> v(static_cast<std::size_t>(len));
    double x = rng.uniform(lo, hi);
    for (auto& e : v) {
      x += rng.uniform(-step, step);
      if (x > hi) x = 2 * hi - x;
      if (x < lo) x = 2 * lo - x;
      e = x;
    }
    return v;
  };
  const auto f1 = walk(), b2 = walk();
  std::vector<double> b1(f1.size()), f2(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    b1[i] = -f1[i];
    f2[i] = -b2[i];
  }
  return ctlab::SystemModel::cocycle_toy({{"c1", {f1, b1}}, {"c2", {f2, b2}}}, 0.1);
}

// The toy where doubling the continuity scale breaks G shrinking: beta1 is
// -1 except for a spike at index 13, beta2_hat is -1. The segment (10, 3)
// is good at r = 0.5, but its neighbour (11, 3) runs into the spike.
inline ctlab::SystemModel spike_toy() {
  std::vector<double> f1(33, -1.0), b2(33, -1.0);
  f1[13] = 5.0;
  std::vector<double> b1(33), f2(33);
  for (std::size_t i = 0; i < 33; ++i) {
    b1[i] = -f1[i];
    f2[i] = -b2[i];
  }
  return ctlab::SystemModel::cocycle_toy({{"c1", {f1, b1}}, {"c2", {f2, b2}}}, 1.0);
}

struct BruteTriple {
  long long p = 0, s = 0;
};

// Tests every prefix and suffix length with freshly summed values.
inline BruteTriple brute_decompose(const std::vector<double>& b1, const std::vector<double>& b2, double r) {
  const long long n = static_cast<long long>(b1.size());
  BruteTriple t;
  for (long long p = 0; p <= n; ++p) {
    double sum = 0;
    for (long long i = 0; i < p; ++i) sum += b1[static_cast<std::size_t>(i)];
    if (sum >= -r * static_cast<double>(p)) t.p = p;
  }
  for (long long s = 0; s <= n - t.p; ++s) {
    double sum = 0;
    for (long long i = n - 1; i >= n - s; --i) sum += b2[static_cast<std::size_t>(i)];
    if (sum >= -r * static_cast<double>(s)) t.s = s;
  }
  return t;
}

}  // namespace instances

#pragma once

// Independent reference computations. Nothing here calls into the library
// except for plain data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Characteristic polynomial det(tI - A) of an integer matrix by
/// Faddeev-LeVerrier; coefficients from t^d down to t^0.
inline std::vector<long long> char_poly(const std::vector<std::vector<long long>>& a) {
  const std::size_t d = a.size();
  using Mat = std::vector<std::vector<long long>>;
  auto mul = [&](const Mat& x, const Mat& y) {
    Mat z(d, std::vector<long long>(d, 0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
  };
  std::vector<long long> c(d + 1, 0);
  c[0] = 1;
  Mat m(d, std::vector<long long>(d, 0));
  for (std::size_t k = 1; k <= d; ++k) {
    Mat am = mul(a, m);
    for (std::size_t i = 0; i < d; ++i) am[i][i] += c[k - 1];
    m = am;
    Mat t = mul(a, m);
    long long tr = 0;
    for (std::size_t i = 0; i < d; ++i) tr += t[i][i];
    c[k] = -tr / static_cast<long long>(k);
  }
  return c;
}

inline long double eval_poly(const std::vector<long long>& c, long double t) {
  long double v = 0;
  for (auto x : c) v = v * t + static_cast<long double>(x);
  return v;
}

/// Real roots of a polynomial with only simple real roots in [-bound, bound],
/// by a fine sign scan and bisection. Ascending order.
inline std::vector<double> real_roots(const std::vector<long long>& c, double bound = 64.0) {
  std::vector<double> roots;
  const int steps = 400000;
  long double prev_t = -bound, prev_v = eval_poly(c, prev_t);
  for (int i = 1; i <= steps; ++i) {
    const long double t = -bound + 2.0L * bound * i / steps;
    const long double v = eval_poly(c, t);
    if (v == 0) {
      roots.push_back(static_cast<double>(t));
    } else if ((prev_v < 0) != (v < 0) && prev_v != 0) {
      long double lo = prev_t, hi = t;
      for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if ((eval_poly(c, lo) < 0) == (eval_poly(c, mid) < 0))
          lo = mid;
        else
          hi = mid;
      }
      roots.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    prev_t = t;
    prev_v = v;
  }
  return roots;
}

/// Plain O(N^2) weighted greedy separated set; returns admitted indices.
template <typename Dist>
std::vector<std::size_t> naive_greedy(std::size_t count, const std::vector<double>& weights,
                                      const std::function<bool(std::size_t, std::size_t)>& before,
                                      Dist dist, double delta) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (weights[i] != weights[j]) return weights[i] > weights[j];
    return before(i, j);
  });
  std::vector<std::size_t> kept;
  for (auto i : order) {
    bool ok = true;
    for (auto j : kept)
      if (!(dist(i, j) > delta)) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(i);
  }
  return kept;
}

/// log of the total weight of all words of length len over k symbols for a
/// potential reading m consecutive symbols, summed over the first len - m + 1
/// positions. (1/len) of this converges to the pressure.
inline double word_sum_log(int k, int m, const std::vector<double>& values, int len) {
  const int positions = len - m + 1;
  std::vector<int> w(static_cast<std::size_t>(len), 0);
  std::vector<double> logs;
  for (;;) {
    double s = 0;
    for (int i = 0; i < positions; ++i) {
      int idx = 0;
      for (int j = 0; j < m; ++j) idx = idx * k + w[static_cast<std::size_t>(i + j)];
      s += values[static_cast<std::size_t>(idx)];
    }
    logs.push_back(s);
    int i = len - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == k - 1) w[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++w[static_cast<std::size_t>(i)];
  }
  const double mx = *std::max_element(logs.begin(), logs.end());
  long double acc = 0;
  for (double v : logs) acc += std::exp(static_cast<long double>(v - mx));
  return mx + static_cast<double>(std::log(acc));
}

}  // namespace oracle

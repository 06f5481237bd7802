#pragma once

// Gauss-Legendre rules on [-1,1]. Nodes are computed once per order by
// Newton iteration on the Legendre recurrence, to long double accuracy,
// which avoids transcribing 20-digit tables.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

namespace circlesum {

struct GaussRule {
  std::vector<long double> nodes;
  std::vector<long double> weights;
};

namespace detail {

inline GaussRule make_gauss_rule(int m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    long double x = std::cos(
        3.141592653589793238462643383279502884L * (i + 0.75L) / (m + 0.5L));
    long double pp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= m; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0L);
      long double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    long double w = 2.0L / ((1.0L - x * x) * pp * pp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[m - 1 - i] = x;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0L;
  return rule;
}

}  // namespace detail

inline const GaussRule& gauss_rule(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, detail::make_gauss_rule(order)).first;
  return it->second;
}

}  // namespace circlesum

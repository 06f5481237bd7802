#pragma once

// Simultaneous rational approximation by exhaustive denominator scan, arc
// membership for the linear block, and best single rational approximation
// via continued-fraction convergents and semiconvergents.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "circlesum/bigint.hpp"
#include "circlesum/expsum.hpp"

namespace circlesum {

struct QScanOptions {
  std::uint64_t scan_budget = 10'000'000;
  double threshold_scale = 1.0;  // exploratory slack; 1.0 = verbatim bounds
};

struct SimultaneousWitness {
  std::uint64_t q = 1;
  std::vector<long double> block_errors;  // max_r ||q alpha_{l,r}|| per block
  std::vector<bool> block_ok;             // per-block bound checks
};

namespace detail {

inline std::uint64_t power_floor(long double base, double expo,
                                 std::uint64_t budget,
                                 const char* what) {
  long double v = std::pow(base, static_cast<long double>(expo));
  if (v > static_cast<long double>(budget) + 0.5L)
    throw budget_error(what, static_cast<double>(v),
                       static_cast<double>(budget));
  // tolerate 1-ulp undershoot of an exact power
  return static_cast<std::uint64_t>(std::floor(v + 1e-9L));
}

}  // namespace detail

// Smallest q <= floor(P^Delta) with ||q alpha_{l,r}|| <= P^(Delta - l) for
// every entry of every nonempty block; absent when no q qualifies.
inline std::optional<SimultaneousWitness> find_simultaneous(
    const BlockVector& alpha, long double P, double delta,
    const QScanOptions& opts = {}) {
  if (!(P > 1)) throw std::invalid_argument("P must exceed 1");
  if (!(delta > 0) || delta > 1)
    throw std::invalid_argument("Delta must lie in (0, 1]");
  const std::uint64_t qmax =
      detail::power_floor(P, delta, opts.scan_budget, "denominator scan too large");
  const int d = static_cast<int>(alpha.blocks.size());
  std::vector<long double> bounds(d);
  for (int ell = 1; ell <= d; ++ell)
    bounds[ell - 1] =
        std::pow(P, static_cast<long double>(delta - ell)) *
        static_cast<long double>(opts.threshold_scale);

  for (std::uint64_t q = 1; q <= qmax; ++q) {
    SimultaneousWitness w;
    w.q = q;
    w.block_errors.assign(d, 0.0L);
    w.block_ok.assign(d, true);
    bool all_ok = true;
    for (int ell = 1; ell <= d; ++ell) {
      long double worst = 0.0L;
      for (long double a : alpha.blocks[ell - 1])
        worst = std::max(worst,
                         nearest_int_distance(static_cast<long double>(q) * a));
      w.block_errors[ell - 1] = worst;
      bool ok = alpha.blocks[ell - 1].empty() || worst <= bounds[ell - 1];
      w.block_ok[ell - 1] = ok;
      all_ok = all_ok && ok;
    }
    if (all_ok) return w;
  }
  return std::nullopt;
}

struct ArcWitness {
  std::vector<std::int64_t> numerators;
  std::uint64_t q = 1;
  long double distance = 0.0L;
};

struct ArcVerdict {
  bool major = false;
  std::optional<ArcWitness> witness;
};

namespace detail {

// nearest integer with ties toward the smaller integer
inline long double nearest_tie_down(long double x) {
  return std::ceil(x - 0.5L);
}

}  // namespace detail

// Major iff some q <= P^C and integer vector a satisfy
// max_r |alpha_r - a_r/q| <= P^(C-1). Smallest q wins; the reported witness
// is gcd-reduced.
inline ArcVerdict arc_membership_linear(std::span<const long double> alpha1,
                                        double C, long double P,
                                        const QScanOptions& opts = {}) {
  if (alpha1.empty()) throw std::invalid_argument("block must be nonempty");
  if (!(P > 1)) throw std::invalid_argument("P must exceed 1");
  if (!(C > 0)) throw std::invalid_argument("C must be positive");
  const std::uint64_t qmax =
      detail::power_floor(P, C, opts.scan_budget, "denominator scan too large");
  const long double radius =
      std::pow(P, static_cast<long double>(C) - 1.0L) *
      static_cast<long double>(opts.threshold_scale);

  for (std::uint64_t q = 1; q <= qmax; ++q) {
    long double worst = 0.0L;
    std::vector<std::int64_t> a(alpha1.size());
    for (std::size_t r = 0; r < alpha1.size(); ++r) {
      long double qa = static_cast<long double>(q) * alpha1[r];
      long double near = detail::nearest_tie_down(qa);
      a[r] = static_cast<std::int64_t>(near);
      worst = std::max(worst, std::fabs(alpha1[r] - near / q));
    }
    if (worst <= radius) {
      ArcWitness w;
      w.q = q;
      w.numerators = std::move(a);
      w.distance = worst;
      std::uint64_t g = q;
      for (auto v : w.numerators)
        g = std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v));
      if (g > 1) {
        w.q = q / g;
        for (auto& v : w.numerators) v /= static_cast<std::int64_t>(g);
      }
      return {true, std::move(w)};
    }
  }
  return {false, std::nullopt};
}

struct RationalApprox {
  std::int64_t numerator = 0;
  std::uint64_t denominator = 1;
  long double error = 0.0L;
};

// Best fraction a/q with q <= qmax minimizing |alpha - a/q|, by walking the
// continued fraction and closing with the deepest admissible semiconvergent.
// Ties resolve to the smaller denominator, then the smaller numerator.
inline RationalApprox best_rational(long double alpha, std::uint64_t qmax) {
  if (qmax < 1) throw std::invalid_argument("qmax must be at least 1");
  if (!std::isfinite(alpha) || std::fabs(alpha) > 1e15L)
    throw std::invalid_argument("alpha out of supported range");

  auto better = [alpha](const RationalApprox& a, const RationalApprox& b) {
    if (a.error != b.error) return a.error < b.error;
    if (a.denominator != b.denominator) return a.denominator < b.denominator;
    return a.numerator < b.numerator;
  };
  auto make = [alpha](std::int64_t p, std::uint64_t q) {
    RationalApprox r;
    r.numerator = p;
    r.denominator = q;
    r.error = std::fabs(alpha - static_cast<long double>(p) /
                                    static_cast<long double>(q));
    return r;
  };

  std::int64_t p_prev = 1, p_cur = static_cast<std::int64_t>(std::floor(alpha));
  std::uint64_t q_prev = 0, q_cur = 1;
  RationalApprox best = make(p_cur, q_cur);
  long double x = alpha - std::floor(alpha);

  for (int iter = 0; iter < 64; ++iter) {
    if (x < 1e-18L) break;  // expansion terminated (alpha is binary-rational)
    x = 1.0L / x;
    long double af = std::floor(x);
    if (af > 4e18L) break;
    std::int64_t a = static_cast<std::int64_t>(af);
    x -= af;
    __int128 qn = static_cast<__int128>(a) * q_cur + q_prev;
    if (qn > static_cast<__int128>(qmax)) {
      // deepest semiconvergent within the budget
      std::uint64_t t = (qmax - q_prev) / q_cur;
      if (t >= 1) {
        __int128 ps = static_cast<__int128>(t) * p_cur + p_prev;
        __int128 qs = static_cast<__int128>(t) * q_cur + q_prev;
        RationalApprox cand = make(static_cast<std::int64_t>(ps),
                                   static_cast<std::uint64_t>(qs));
        if (better(cand, best)) best = cand;
      }
      break;
    }
    __int128 pn = static_cast<__int128>(a) * p_cur + p_prev;
    if (pn > static_cast<__int128>(INT64_MAX) ||
        pn < -static_cast<__int128>(INT64_MAX))
      break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = static_cast<std::int64_t>(pn);
    q_cur = static_cast<std::uint64_t>(qn);
    RationalApprox cand = make(p_cur, q_cur);
    if (better(cand, best)) best = cand;
    if (cand.error == 0.0L) break;
  }
  return best;
}

}  // namespace circlesum

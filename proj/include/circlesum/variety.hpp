#pragma once

// Exhaustive counting of the degenerate (rank-deficient) integer tuples, the
// power-law fit that estimates the codimension exponent g from a series of
// counts, and the derived per-degree constants feeding the thresholds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "circlesum/extended_rational.hpp"
#include "circlesum/parallel.hpp"
#include "circlesum/weyl.hpp"

namespace circlesum {

struct CountOptions {
  std::uint64_t enumeration_budget = 100'000'000;
  unsigned workers = 1;
};

// Number of (ell-1)-tuples of integer points in [-R0, R0]^n whose difference
// matrix has rank < r_ell. The zero tuple always qualifies.
inline std::uint64_t count_rank_deficient(const GradedSystem& s, int ell,
                                          std::int64_t R0,
                                          const CountOptions& opts = {}) {
  if (ell < 2 || ell > s.max_degree())
    throw std::invalid_argument("ell must lie in [2, d]");
  const int r_ell = s.block_size(ell);
  if (r_ell == 0)
    throw std::invalid_argument("block " + std::to_string(ell) + " is empty");
  if (R0 < 1) throw std::invalid_argument("R0 must be positive");

  const int tuples = ell - 1;
  const int dims = s.n * tuples;
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(R0) + 1;
  long double estimate = std::pow(static_cast<long double>(side), dims);
  if (estimate > static_cast<long double>(opts.enumeration_budget))
    throw budget_error("enumeration box too large",
                       static_cast<double>(estimate),
                       static_cast<double>(opts.enumeration_budget));
  std::uint64_t total = 1;
  for (int i = 0; i < dims; ++i) total *= side;

  std::vector<Polynomial> forms;
  for (int r = 1; r <= r_ell; ++r) forms.push_back(s.form(ell, r));

  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t nchunks = (total + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> partial(nchunks, 0);

  parallel_chunks(nchunks, opts.workers, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    std::uint64_t count = 0;
    std::vector<LatticePoint> pts(tuples, LatticePoint(s.n, 0));
    std::vector<LatticePoint> args(tuples + 1, LatticePoint(s.n, 0));
    std::vector<std::vector<BigInt>> matrix(
        r_ell, std::vector<BigInt>(s.n));
    for (std::uint64_t flat = begin; flat < end; ++flat) {
      std::uint64_t rest = flat;
      for (int t = 0; t < tuples; ++t)
        for (int i = 0; i < s.n; ++i) {
          pts[t][i] = static_cast<std::int64_t>(rest % side) - R0;
          rest /= side;
        }
      for (int t = 0; t < tuples; ++t) args[t] = pts[t];
      for (int r = 0; r < r_ell; ++r) {
        for (int i = 0; i < s.n; ++i) {
          std::fill(args.back().begin(), args.back().end(), 0);
          args.back()[i] = 1;
          matrix[r][i] = weyl_diff(forms[r], ell, args);
        }
      }
      if (rank_exact(matrix) < r_ell) ++count;
    }
    partial[chunk] = count;
  });

  std::uint64_t count = 0;
  for (auto c : partial) count += c;
  return count;
}

struct CountSeries {
  int ell = 0;
  // (R0, count) pairs with R0 strictly increasing
  std::vector<std::pair<std::int64_t, std::uint64_t>> samples;
};

struct GEstimate {
  double g_hat = 0;          // n(ell-1) - slope, clamped to [0, n(ell-1)]
  double std_err = 0;        // regression standard error of the slope
  double exponent_fit = 0;   // fitted slope of log z against log R0
  int zero_samples_replaced = 0;
};

// Least-squares fit of log z against log R0. Zero counts are replaced by 1
// for the fit and flagged, never dropped silently.
inline GEstimate estimate_g(const CountSeries& series, int n, int ell) {
  const auto& pts = series.samples;
  if (pts.size() < 3)
    throw std::invalid_argument("need at least 3 samples for the fit");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first <= pts[i - 1].first)
      throw std::invalid_argument("R0 values must be strictly increasing");
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");

  GEstimate out;
  const double full_dim = static_cast<double>(n) * (ell - 1);
  std::vector<double> xs, ys;
  for (const auto& [r0, z] : pts) {
    std::uint64_t count = z;
    if (count == 0) {
      count = 1;
      ++out.zero_samples_replaced;
    }
    xs.push_back(std::log(static_cast<double>(r0)));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  const std::size_t m = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double resid = ys[i] - my - slope * (xs[i] - mx);
    ssr += resid * resid;
  }
  out.exponent_fit = slope;
  out.g_hat = std::clamp(full_dim - slope, 0.0, full_dim);
  out.std_err = m > 2 ? std::sqrt(std::max(0.0, ssr / (m - 2)) / sxx) : 0.0;
  return out;
}

// gamma_ell = 2^(ell-1) (ell-1) r_ell / g; 0 when the block is empty, +inf
// when the block is nonempty but g vanishes.
inline ExtendedRational gamma_ell(const ExtendedRational& g_hat, int ell,
                                  int r_ell) {
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  if (r_ell == 0) return ExtendedRational(0);
  if (g_hat.is_zero()) return ExtendedRational::infinity();
  BigInt pow2 = BigInt(1) << (ell - 1);
  BigRat numer(pow2 * ((ell - 1) * r_ell));
  return ExtendedRational(numer) * g_hat.reciprocal();
}

inline ExtendedRational gamma_ell(double g_hat, int ell, int r_ell) {
  return gamma_ell(ExtendedRational::from_double(g_hat), ell, r_ell);
}

// gamma'_ell = gamma_ell / ((ell-1) r_ell); undefined for empty blocks
inline ExtendedRational gamma_prime(const ExtendedRational& gamma, int ell,
                                    int r_ell) {
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  if (r_ell == 0)
    throw std::invalid_argument("gamma' is undefined when the block is empty");
  if (gamma.is_infinite()) return ExtendedRational::infinity();
  return ExtendedRational(BigRat(gamma.rational() / ((ell - 1) * r_ell)));
}

struct GammaMeasurement {
  int ell = 0;
  int r_ell = 0;
  CountSeries series;
  GEstimate estimate;
  ExtendedRational gamma;        // 0 for empty blocks
  ExtendedRational gamma_prime;  // meaningful only when r_ell > 0
};

// Runs the counting pipeline for every degree block with ell >= 2.
inline std::vector<GammaMeasurement> measure_gammas(
    const GradedSystem& s, std::span<const std::int64_t> r0_values,
    const CountOptions& opts = {}) {
  std::vector<GammaMeasurement> out;
  for (int ell = 2; ell <= s.max_degree(); ++ell) {
    GammaMeasurement gm;
    gm.ell = ell;
    gm.r_ell = s.block_size(ell);
    if (gm.r_ell == 0) {
      gm.gamma = ExtendedRational(0);
      out.push_back(std::move(gm));
      continue;
    }
    gm.series.ell = ell;
    for (auto r0 : r0_values)
      gm.series.samples.emplace_back(r0,
                                     count_rank_deficient(s, ell, r0, opts));
    gm.estimate = estimate_g(gm.series, s.n, ell);
    gm.gamma = gamma_ell(gm.estimate.g_hat, ell, gm.r_ell);
    gm.gamma_prime = gamma_prime(gm.gamma, ell, gm.r_ell);
    out.push_back(std::move(gm));
  }
  return out;
}

}  // namespace circlesum

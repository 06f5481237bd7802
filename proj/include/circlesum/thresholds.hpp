#pragma once

// The explicit threshold constants (admissible Omega supremum, the demand on
// the linear-block invariant, the approximation exponent constant) evaluated
// in exact rational arithmetic, and the empirical two-alternative check: at
// each frequency point either the sum shows power saving or a small common
// denominator approximates every block.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circlesum/dioph.hpp"
#include "circlesum/expsum.hpp"
#include "circlesum/extended_rational.hpp"
#include "circlesum/linforms.hpp"
#include "circlesum/parallel.hpp"

namespace circlesum {

// weighted sum over j = 2..d of 4^(j-2) * gamma_j; gammas[k] holds gamma for
// ell = k + 2
inline ExtendedRational gamma_weighted_sum(
    std::span<const ExtendedRational> gammas) {
  ExtendedRational acc(0);
  BigInt weight = 1;
  for (const auto& g : gammas) {
    if (g.is_infinite()) return ExtendedRational::infinity();
    acc = acc + ExtendedRational(BigRat(g.rational() * weight));
    weight *= 4;
  }
  return acc;
}

// sup of admissible Omega: min of 1/((8 r1 + 9) * gsum) and
// 1/(1/(2(R+1)) + gsum)
inline ExtendedRational omega_sup(const ExtendedRational& gamma_sum, int r1,
                                  int R) {
  if (gamma_sum.is_infinite()) return ExtendedRational(0);
  ExtendedRational half_recip(1, 2L * (R + 1));
  ExtendedRational second = (half_recip + gamma_sum).reciprocal();
  if (gamma_sum.is_zero()) return second;  // first branch diverges
  ExtendedRational first =
      ExtendedRational(1, 8L * r1 + 9) * gamma_sum.reciprocal();
  return min(first, second);
}

// the lower bound the linear-block invariant must exceed:
// 2 r1 / max(4 (r1+1) gsum, 1/(4(R+1))); vacuous (0) when r1 = 0
inline ExtendedRational b1_required(const ExtendedRational& gamma_sum, int r1,
                                    int R) {
  if (r1 == 0) return ExtendedRational(0);
  ExtendedRational denom;
  if (gamma_sum.is_infinite()) {
    denom = ExtendedRational::infinity();
  } else {
    denom = max(ExtendedRational(4L * (r1 + 1)) * gamma_sum,
                ExtendedRational(1, 4L * (R + 1)));
  }
  return ExtendedRational(2L * r1) * denom.reciprocal();
}

// max(8 (r1+1) gsum, 1/(2(R+1)))
inline ExtendedRational m_zero(const ExtendedRational& gamma_sum, int r1,
                               int R) {
  if (gamma_sum.is_infinite()) return ExtendedRational::infinity();
  return max(ExtendedRational(8L * (r1 + 1)) * gamma_sum,
             ExtendedRational(1, 2L * (R + 1)));
}

struct ThresholdReport {
  ExtendedRational gamma_sum;
  ExtendedRational m0;
  ExtendedRational b1_req;
  ExtendedRational omega;
  std::optional<int> b1_observed;  // nullopt = +infinity (empty linear block)
  bool feasible = false;
};

inline ThresholdReport threshold_report(const ExtendedRational& gamma_sum,
                                        int r1, int R,
                                        std::optional<int> b1_observed) {
  ThresholdReport rep;
  rep.gamma_sum = gamma_sum;
  rep.m0 = m_zero(gamma_sum, r1, R);
  rep.b1_req = b1_required(gamma_sum, r1, R);
  rep.omega = omega_sup(gamma_sum, r1, R);
  rep.b1_observed = b1_observed;
  bool b1_ok = !b1_observed.has_value()  // +infinity beats any finite demand
                   ? true
                   : ExtendedRational(*b1_observed) > rep.b1_req;
  rep.feasible = !gamma_sum.is_infinite() && !rep.m0.is_infinite() &&
                 !rep.b1_req.is_infinite() && !rep.omega.is_infinite() &&
                 !rep.omega.is_zero() && b1_ok;
  return rep;
}

enum class DichotomyClass { kAltI, kAltII, kBoth, kViolation };

inline const char* to_string(DichotomyClass c) {
  switch (c) {
    case DichotomyClass::kAltI: return "ALT_I";
    case DichotomyClass::kAltII: return "ALT_II";
    case DichotomyClass::kBoth: return "BOTH";
    case DichotomyClass::kViolation: return "VIOLATION";
  }
  return "?";
}

struct DichotomyVerdict {
  BlockVector alpha;
  long double sum_magnitude = 0.0L;
  long double bound_i = 0.0L;  // P^(n - Delta * Omega), scaled by any slack
  std::optional<SimultaneousWitness> witness;
  DichotomyClass classification = DichotomyClass::kAltI;
  bool failed = false;  // budget exhaustion for this point; run continues
  std::string failure;
};

struct DichotomySummary {
  std::size_t alt_i = 0;
  std::size_t alt_ii = 0;
  std::size_t both = 0;
  std::size_t violations = 0;
  std::size_t errors = 0;
  std::vector<std::size_t> violation_indices;
  bool omega_checked = false;
  bool omega_admissible = false;
};

struct DichotomyOptions {
  double slack = 1.0;  // multiplicative slack on both alternatives' bounds
  SumOptions sum;
  QScanOptions qscan;
  unsigned workers = 1;
  // measured weighted gamma sum, used to check Omega admissibility
  std::optional<ExtendedRational> measured_gamma_sum;
};

inline std::pair<std::vector<DichotomyVerdict>, DichotomySummary>
verify_dichotomy(const GradedSystem& s, long double P, double delta,
                 double omega, std::span<const BlockVector> grid,
                 const DichotomyOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("grid must be nonempty");
  if (!(P > 1)) throw std::invalid_argument("P must exceed 1");
  if (!(delta > 0) || delta > 1)
    throw std::invalid_argument("Delta must lie in (0, 1]");
  if (!(omega > 0)) throw std::invalid_argument("Omega must be positive");

  DichotomySummary summary;
  int r1 = s.block_size(1);
  int R = s.total_forms();
  if (opts.measured_gamma_sum.has_value()) {
    summary.omega_checked = true;
    summary.omega_admissible = ExtendedRational::from_double(omega) <
                               omega_sup(*opts.measured_gamma_sum, r1, R);
  }

  const long double bound =
      static_cast<long double>(opts.slack) *
      std::pow(P, static_cast<long double>(s.n) -
                      static_cast<long double>(delta) * omega);

  BoxSpec box{P, s.n};
  QScanOptions qscan = opts.qscan;
  qscan.threshold_scale = opts.slack * opts.qscan.threshold_scale;
  SumOptions sum_opts = opts.sum;
  sum_opts.workers = 1;  // outer loop already parallel

  std::vector<DichotomyVerdict> verdicts(grid.size());
  parallel_chunks(grid.size(), opts.workers, [&](std::size_t i) {
    DichotomyVerdict& v = verdicts[i];
    v.alpha = grid[i];
    v.bound_i = bound;
    try {
      v.sum_magnitude = std::abs(exponential_sum(s, box, grid[i], sum_opts));
      v.witness = find_simultaneous(grid[i], P, delta, qscan);
      bool small = v.sum_magnitude <= bound;
      bool approx = v.witness.has_value();
      if (small && approx)
        v.classification = DichotomyClass::kBoth;
      else if (small)
        v.classification = DichotomyClass::kAltI;
      else if (approx)
        v.classification = DichotomyClass::kAltII;
      else
        v.classification = DichotomyClass::kViolation;
    } catch (const budget_error& e) {
      v.failed = true;
      v.failure = e.what();
    }
  });

  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto& v = verdicts[i];
    if (v.failed) {
      ++summary.errors;
      continue;
    }
    switch (v.classification) {
      case DichotomyClass::kAltI: ++summary.alt_i; break;
      case DichotomyClass::kAltII: ++summary.alt_ii; break;
      case DichotomyClass::kBoth: ++summary.both; break;
      case DichotomyClass::kViolation:
        ++summary.violations;
        summary.violation_indices.push_back(i);
        break;
    }
  }
  return {std::move(verdicts), std::move(summary)};
}

}  // namespace circlesum

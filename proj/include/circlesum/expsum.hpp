#pragma once

// Exact evaluation of the exponential sum over the lattice box [0,P]^n.
// Each phase is assembled from the exact integer value of every block
// polynomial, reduced mod 1 before exponentiation, and accumulated with
// compensated summation over a fixed chunk tree, so results are
// bit-identical across runs and worker counts.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "circlesum/bigint.hpp"
#include "circlesum/parallel.hpp"
#include "circlesum/system.hpp"

namespace circlesum {

// Real entries grouped by degree block; doubles as the frequency vector of
// the exponential sum and the spectral parameter of the singular integral.
struct BlockVector {
  std::vector<std::vector<long double>> blocks;

  static BlockVector zeros_like(const GradedSystem& s) {
    BlockVector v;
    v.blocks.resize(s.max_degree());
    for (int ell = 1; ell <= s.max_degree(); ++ell)
      v.blocks[ell - 1].assign(s.block_size(ell), 0.0L);
    return v;
  }

  std::size_t total_entries() const {
    std::size_t r = 0;
    for (const auto& b : blocks) r += b.size();
    return r;
  }

  bool matches(const GradedSystem& s) const {
    if (static_cast<int>(blocks.size()) != s.max_degree()) return false;
    for (int ell = 1; ell <= s.max_degree(); ++ell)
      if (static_cast<int>(blocks[ell - 1].size()) != s.block_size(ell))
        return false;
    return true;
  }
};

using AlphaVector = BlockVector;
using TauVector = BlockVector;

struct BoxSpec {
  long double side = 1.0L;  // P
  int n = 1;
};

struct AlphaNorms {
  long double nearest_int;  // max distance to the closest integer
  long double sup;          // max absolute value
};

inline AlphaNorms alpha_norms(const BlockVector& a) {
  AlphaNorms out{0.0L, 0.0L};
  for (const auto& block : a.blocks) {
    for (long double x : block) {
      if (!std::isfinite(x))
        throw std::invalid_argument("non-finite block entry");
      out.nearest_int = std::max(out.nearest_int, nearest_int_distance(x));
      out.sup = std::max(out.sup, std::fabs(x));
    }
  }
  return out;
}

struct SumOptions {
  std::uint64_t lattice_budget = 100'000'000;
  unsigned workers = 1;
};

namespace detail {

inline constexpr std::uint64_t kSumChunk = 65536;

// (floor(P)+1)^n with overflow saturation
inline std::uint64_t lattice_size(long double side, int n, std::uint64_t cap) {
  std::uint64_t per_axis = static_cast<std::uint64_t>(std::floor(side)) + 1;
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > cap / per_axis + 1) return cap + 1;
    total *= per_axis;
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace detail

inline std::complex<long double> exponential_sum(const GradedSystem& s,
                                                 const BoxSpec& box,
                                                 const BlockVector& alpha,
                                                 const SumOptions& opts = {}) {
  if (box.n != s.n) throw std::invalid_argument("box dimension mismatch");
  if (!(box.side > 0)) throw std::invalid_argument("box side must be positive");
  if (!alpha.matches(s))
    throw std::invalid_argument("frequency vector shape mismatch");

  const std::uint64_t m = static_cast<std::uint64_t>(std::floor(box.side));
  const std::uint64_t per_axis = m + 1;
  const std::uint64_t total =
      detail::lattice_size(box.side, s.n, opts.lattice_budget);
  if (total > opts.lattice_budget)
    throw budget_error("lattice too large for the configured budget",
                       std::pow(static_cast<double>(per_axis), s.n),
                       static_cast<double>(opts.lattice_budget));

  // flatten the active forms once
  struct Entry {
    const Polynomial* poly;
    long double alpha;
  };
  std::vector<Entry> entries;
  for (int ell = 1; ell <= s.max_degree(); ++ell)
    for (int r = 1; r <= s.block_size(ell); ++r)
      entries.push_back({&s.poly(ell, r), alpha.blocks[ell - 1][r - 1]});

  const std::uint64_t nchunks =
      (total + detail::kSumChunk - 1) / detail::kSumChunk;
  std::vector<std::complex<long double>> partial(nchunks);

  parallel_chunks(nchunks, opts.workers, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * detail::kSumChunk;
    const std::uint64_t end = std::min(total, begin + detail::kSumChunk);
    CompensatedSum re, im;
    std::vector<BigInt> x(s.n);
    for (std::uint64_t flat = begin; flat < end; ++flat) {
      std::uint64_t rest = flat;
      for (int i = 0; i < s.n; ++i) {
        x[i] = static_cast<unsigned long>(rest % per_axis);
        rest /= per_axis;
      }
      long double phase = 0.0L;
      for (const auto& e : entries) {
        BigInt value = e.poly->eval(std::span<const BigInt>(x));
        phase += frac_product_mod1(e.alpha, value);
      }
      auto z = unit_phase(phase);
      re.add(z.real());
      im.add(z.imag());
    }
    partial[chunk] = {re.total(), im.total()};
  });

  CompensatedSum re, im;
  for (const auto& p : partial) {
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.total(), im.total()};
}

}  // namespace circlesum

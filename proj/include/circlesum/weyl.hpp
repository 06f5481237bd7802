#pragma once

// The ell-fold alternating difference of a polynomial over subset sums of
// ell points, its exact symbolic expansion, and the matrix of differenced
// forms against coordinate directions whose rank deficiency defines the
// degenerate tuples counted by the variety module.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "circlesum/polynomial.hpp"
#include "circlesum/rank.hpp"
#include "circlesum/system.hpp"

namespace circlesum {

using LatticePoint = std::vector<std::int64_t>;

// sum over t in {0,1}^ell of (-1)^(t_1+...+t_ell) * g(t_1 x_1 + ... + t_ell x_ell)
inline BigInt weyl_diff(const Polynomial& g, int ell,
                        std::span<const LatticePoint> pts) {
  const int n = g.var_count();
  if (ell < 1 || static_cast<int>(pts.size()) != ell)
    throw std::invalid_argument("point count must equal ell");
  for (const auto& p : pts)
    if (static_cast<int>(p.size()) != n)
      throw std::invalid_argument("point dimension mismatch");
  BigInt acc = 0;
  std::vector<BigInt> arg(n);
  for (std::uint32_t mask = 0; mask < (1u << ell); ++mask) {
    for (int i = 0; i < n; ++i) arg[i] = 0;
    for (int j = 0; j < ell; ++j) {
      if (mask & (1u << j)) {
        for (int i = 0; i < n; ++i)
          arg[i] += static_cast<long>(pts[j][i]);
      }
    }
    BigInt v = g.eval(std::span<const BigInt>(arg));
    if (__builtin_popcount(mask) & 1)
      acc -= v;
    else
      acc += v;
  }
  return acc;
}

// Exact expansion of the difference as a polynomial in ell*n variables; block
// j (1-based) occupies variables (j-1)*n+1 .. j*n. Grows exponentially in
// ell, hence the variable budget.
inline Polynomial weyl_diff_poly(const Polynomial& g, int ell,
                                 int max_vars = 16) {
  const int n = g.var_count();
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  const int big_n = ell * n;
  if (big_n > max_vars)
    throw std::invalid_argument("ell*n exceeds the variable budget of " +
                                std::to_string(max_vars));
  Polynomial acc(big_n);
  for (std::uint32_t mask = 0; mask < (1u << ell); ++mask) {
    // variable i of g becomes the sum of x_{j,i} over blocks j in the mask
    std::vector<Polynomial> subst;
    subst.reserve(n);
    for (int i = 0; i < n; ++i) {
      Polynomial s(big_n);
      for (int j = 0; j < ell; ++j)
        if (mask & (1u << j))
          s = s + Polynomial::variable(big_n, j * n + i + 1);
      subst.push_back(std::move(s));
    }
    Polynomial composed(big_n);
    for (const auto& t : g.terms()) {
      Polynomial prod = Polynomial::constant(big_n, t.coefficient);
      for (int i = 0; i < n; ++i)
        if (t.exponents[i] > 0)
          prod = prod * subst[i].pow(static_cast<unsigned>(t.exponents[i]));
      composed = composed + prod;
    }
    acc = (__builtin_popcount(mask) & 1) ? acc - composed : acc + composed;
  }
  return acc;
}

struct DiffMatrix {
  int ell = 0;
  std::vector<LatticePoint> points;          // the (ell-1)-tuple used
  std::vector<std::vector<BigInt>> entries;  // r_ell rows, n columns
};

// entry (r, i) is the difference of the form U_{ell,r} at (pts..., e_i)
inline DiffMatrix diff_matrix(const GradedSystem& s, int ell,
                              std::span<const LatticePoint> pts) {
  if (ell < 2 || ell > s.max_degree())
    throw std::invalid_argument("ell must lie in [2, d]");
  const int r_ell = s.block_size(ell);
  if (r_ell == 0)
    throw std::invalid_argument("block " + std::to_string(ell) + " is empty");
  if (static_cast<int>(pts.size()) != ell - 1)
    throw std::invalid_argument("expected ell-1 points");
  DiffMatrix m;
  m.ell = ell;
  m.points.assign(pts.begin(), pts.end());
  m.entries.assign(r_ell, std::vector<BigInt>(s.n));
  std::vector<LatticePoint> args(pts.begin(), pts.end());
  args.emplace_back(s.n, 0);
  for (int r = 1; r <= r_ell; ++r) {
    Polynomial form = s.form(ell, r);
    for (int i = 0; i < s.n; ++i) {
      std::fill(args.back().begin(), args.back().end(), 0);
      args.back()[i] = 1;
      m.entries[r - 1][i] = weyl_diff(form, ell, args);
    }
  }
  return m;
}

inline int rank_exact(const DiffMatrix& m) { return rank_exact(m.entries); }

}  // namespace circlesum

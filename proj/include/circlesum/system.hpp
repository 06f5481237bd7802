#pragma once

// A graded polynomial system: for each degree ell in 1..d, a block of
// integer-coefficient polynomials whose degree-ell part is nonzero. The
// degree-ell parts are the associated forms.

#include <string>
#include <vector>

#include "circlesum/polynomial.hpp"

namespace circlesum {

struct GradedSystem {
  int n = 0;
  // blocks[l-1] holds the degree-(l) entries; may be empty
  std::vector<std::vector<Polynomial>> blocks;

  int max_degree() const { return static_cast<int>(blocks.size()); }

  int block_size(int ell) const {
    if (ell < 1 || ell > max_degree()) return 0;
    return static_cast<int>(blocks[ell - 1].size());
  }

  int total_forms() const {
    int r = 0;
    for (const auto& b : blocks) r += static_cast<int>(b.size());
    return r;
  }

  // u_{ell,r}; ell and r are 1-based
  const Polynomial& poly(int ell, int r) const {
    return blocks.at(ell - 1).at(r - 1);
  }

  // the form U_{ell,r} (degree-ell part of u_{ell,r})
  Polynomial form(int ell, int r) const {
    return poly(ell, r).degree_part(ell);
  }
};

struct SystemViolation {
  int ell = 0;
  int r = 0;
  std::string message;
};

// Empty result iff every block entry has a nonzero degree-ell part, degree at
// most ell, and the declared variable count. Violations are data, not errors.
inline std::vector<SystemViolation> validate_system(const GradedSystem& s) {
  std::vector<SystemViolation> out;
  if (s.n < 1)
    out.push_back({0, 0, "system must declare at least one variable"});
  for (int ell = 1; ell <= s.max_degree(); ++ell) {
    for (int r = 1; r <= s.block_size(ell); ++r) {
      const Polynomial& p = s.poly(ell, r);
      if (p.var_count() != s.n) {
        out.push_back({ell, r,
                       "entry (" + std::to_string(ell) + "," + std::to_string(r) +
                           ") has variable count " + std::to_string(p.var_count()) +
                           ", system declares " + std::to_string(s.n)});
        continue;
      }
      if (p.degree() > ell) {
        out.push_back({ell, r,
                       "entry (" + std::to_string(ell) + "," + std::to_string(r) +
                           ") has degree " + std::to_string(p.degree()) +
                           " > block degree " + std::to_string(ell)});
      } else if (p.degree_part(ell).is_zero()) {
        out.push_back({ell, r,
                       "entry (" + std::to_string(ell) + "," + std::to_string(r) +
                           ") has zero degree-" + std::to_string(ell) + " part"});
      }
    }
  }
  return out;
}

}  // namespace circlesum

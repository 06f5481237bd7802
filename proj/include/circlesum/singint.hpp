#pragma once

// The archimedean density: the integral over the unit box of the unit-phase
// exponential of the weighted forms. The phase is additive over monomials,
// so variables that never share a monomial split the integral into an exact
// product of lower-dimensional factors; each factor is handled by adaptive
// tensor-Gauss quadrature on an initial grid fine enough to resolve the
// oscillation, then refined where the embedded error estimate is worst.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "circlesum/expsum.hpp"
#include "circlesum/parallel.hpp"
#include "circlesum/quadrature.hpp"
#include "circlesum/system.hpp"

namespace circlesum {

struct QuadOptions {
  std::uint64_t cell_budget = 2'000'000;
  unsigned workers = 1;
  int refine_batch = 256;
  bool factorize = true;  // tests can force the monolithic path
};

struct QuadResult {
  std::complex<long double> value{0.0L, 0.0L};
  long double err_estimate = 0.0L;
  bool converged = true;
  std::uint64_t cells = 0;
};

namespace detail {

struct OscMonomial {
  long double coef;
  std::vector<std::int32_t> exps;
};

struct FactorIntegrand {
  int dim = 0;
  std::vector<OscMonomial> monomials;

  long double phase(const std::array<long double, 4>& v) const {
    long double acc = 0.0L;
    for (const auto& m : monomials) {
      long double t = m.coef;
      for (int i = 0; i < dim; ++i)
        for (std::int32_t k = 0; k < m.exps[i]; ++k) t *= v[i];
      acc += t;
    }
    return acc;
  }
};

struct QuadCell {
  std::array<long double, 4> lo{};
  std::array<long double, 4> hi{};
  std::complex<long double> value{0.0L, 0.0L};
  long double est = 0.0L;
  bool alive = true;
};

inline void evaluate_cell(const FactorIntegrand& f, QuadCell& cell) {
  const GaussRule& fine = gauss_rule(7);
  const GaussRule& coarse = gauss_rule(5);
  auto tensor = [&](const GaussRule& rule) {
    std::complex<long double> acc = 0;
    std::array<int, 4> idx{0, 0, 0, 0};
    const int order = static_cast<int>(rule.nodes.size());
    while (true) {
      long double w = 1.0L;
      std::array<long double, 4> v{};
      for (int i = 0; i < f.dim; ++i) {
        long double half = 0.5L * (cell.hi[i] - cell.lo[i]);
        v[i] = cell.lo[i] + half * (rule.nodes[idx[i]] + 1.0L);
        w *= half * rule.weights[idx[i]];
      }
      acc += w * unit_phase(f.phase(v));
      int axis = 0;
      while (axis < f.dim) {
        if (++idx[axis] < order) break;
        idx[axis] = 0;
        ++axis;
      }
      if (axis == f.dim) break;
    }
    return acc;
  };
  std::complex<long double> hi = tensor(fine);
  std::complex<long double> lo = tensor(coarse);
  cell.value = hi;
  cell.est = std::abs(hi - lo);
}

inline QuadResult integrate_factor(const FactorIntegrand& f,
                                   std::uint64_t init_per_axis,
                                   long double tol, const QuadOptions& opts) {
  QuadResult out;
  bool aliased = false;
  std::uint64_t per_axis = std::max<std::uint64_t>(1, init_per_axis);
  // keep the initial grid inside the cell budget
  while (true) {
    long double total = std::pow(static_cast<long double>(per_axis), f.dim);
    if (total <= static_cast<long double>(opts.cell_budget) || per_axis == 1)
      break;
    per_axis /= 2;
    aliased = true;
  }
  std::uint64_t ncells = 1;
  for (int i = 0; i < f.dim; ++i) ncells *= per_axis;

  std::vector<QuadCell> cells(ncells);
  const long double h = 1.0L / static_cast<long double>(per_axis);
  parallel_chunks(ncells, opts.workers, [&](std::size_t flat) {
    QuadCell& c = cells[flat];
    std::size_t rest = flat;
    for (int i = 0; i < f.dim; ++i) {
      std::size_t k = rest % per_axis;
      rest /= per_axis;
      c.lo[i] = k * h;
      c.hi[i] = (k + 1) * h;
    }
    evaluate_cell(f, c);
  });

  long double total_est = 0.0L;
  for (const auto& c : cells) total_est += c.est;

  const std::uint64_t children_per_split = 1ull << f.dim;
  while (total_est > tol &&
         cells.size() + children_per_split <= opts.cell_budget) {
    // worst cells first; ties resolve to the lower index
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].alive && cells[i].est > 0) alive.push_back(i);
    if (alive.empty()) break;
    std::size_t batch = std::min<std::size_t>(opts.refine_batch, alive.size());
    std::partial_sort(alive.begin(), alive.begin() + batch, alive.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (cells[a].est != cells[b].est)
                          return cells[a].est > cells[b].est;
                        return a < b;
                      });
    alive.resize(batch);
    std::size_t first_child = cells.size();
    std::size_t nchildren = 0;
    for (std::size_t idx : alive) {
      if (cells.size() + children_per_split > opts.cell_budget) break;
      QuadCell parent = cells[idx];
      cells[idx].alive = false;
      total_est -= parent.est;
      for (std::uint64_t corner = 0; corner < children_per_split; ++corner) {
        QuadCell child;
        for (int i = 0; i < f.dim; ++i) {
          long double mid = 0.5L * (parent.lo[i] + parent.hi[i]);
          if (corner & (1ull << i)) {
            child.lo[i] = mid;
            child.hi[i] = parent.hi[i];
          } else {
            child.lo[i] = parent.lo[i];
            child.hi[i] = mid;
          }
        }
        cells.push_back(child);
        ++nchildren;
      }
    }
    parallel_chunks(nchildren, opts.workers, [&](std::size_t k) {
      evaluate_cell(f, cells[first_child + k]);
    });
    for (std::size_t k = 0; k < nchildren; ++k)
      total_est += cells[first_child + k].est;
  }

  CompensatedSum re, im, est;
  std::uint64_t alive_count = 0;
  for (const auto& c : cells) {
    if (!c.alive) continue;
    re.add(c.value.real());
    im.add(c.value.imag());
    est.add(c.est);
    ++alive_count;
  }
  out.value = {re.total(), im.total()};
  out.err_estimate = est.total();
  out.cells = alive_count;
  out.converged = !aliased && out.err_estimate <= tol;
  if (aliased) out.err_estimate = std::max(out.err_estimate, 2.0L * tol);
  return out;
}

}  // namespace detail

inline QuadResult singular_integral(const GradedSystem& s,
                                    const BlockVector& tau, long double tol,
                                    const QuadOptions& opts = {}) {
  if (s.n < 1 || s.n > 4)
    throw std::invalid_argument("quadrature supports 1 <= n <= 4");
  if (!(tol >= 1e-10L))
    throw std::invalid_argument("tolerance must be at least 1e-10");
  if (!tau.matches(s))
    throw std::invalid_argument("spectral vector shape mismatch");

  // weighted monomials of the phase: tau_{l,r} times the forms U_{l,r}
  struct GlobalMonomial {
    long double coef;
    std::vector<std::int32_t> exps;
  };
  std::vector<GlobalMonomial> monos;
  for (int ell = 1; ell <= s.max_degree(); ++ell) {
    for (int r = 1; r <= s.block_size(ell); ++r) {
      long double t = tau.blocks[ell - 1][r - 1];
      if (t == 0.0L) continue;
      Polynomial form = s.form(ell, r);
      for (const auto& term : form.terms())
        monos.push_back({t * to_long_double(term.coefficient), term.exponents});
    }
  }

  // connected components of variables under monomial co-occurrence
  std::vector<int> parent(s.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (opts.factorize) {
    for (const auto& m : monos) {
      int first = -1;
      for (int i = 0; i < s.n; ++i) {
        if (m.exps[i] == 0) continue;
        if (first < 0)
          first = i;
        else
          parent[find(i)] = find(first);
      }
    }
  } else {
    for (int i = 1; i < s.n; ++i) parent[find(i)] = find(0);
  }

  std::vector<std::vector<int>> components;
  {
    std::vector<int> root_slot(s.n, -1);
    for (int i = 0; i < s.n; ++i) {
      int r = find(i);
      if (root_slot[r] < 0) {
        root_slot[r] = static_cast<int>(components.size());
        components.emplace_back();
      }
      components[root_slot[r]].push_back(i);
    }
  }

  long double sup = alpha_norms(tau).sup;
  std::uint64_t init_per_axis = static_cast<std::uint64_t>(
      std::ceil(4.0L * (1.0L + sup)));

  QuadResult out;
  out.value = {1.0L, 0.0L};
  std::vector<QuadResult> factors;
  for (const auto& comp : components) {
    detail::FactorIntegrand f;
    f.dim = static_cast<int>(comp.size());
    if (f.dim > 4) throw std::invalid_argument("factor dimension exceeds 4");
    bool empty = true;
    for (const auto& m : monos) {
      bool mine = false;
      for (int v : comp)
        if (m.exps[v] != 0) mine = true;
      if (!mine) continue;
      empty = false;
      detail::OscMonomial local;
      local.coef = m.coef;
      local.exps.resize(f.dim);
      for (int k = 0; k < f.dim; ++k) local.exps[k] = m.exps[comp[k]];
      f.monomials.push_back(std::move(local));
    }
    if (empty) continue;  // factor integrates to 1
    long double factor_tol =
        tol / static_cast<long double>(2 * components.size());
    factors.push_back(detail::integrate_factor(f, init_per_axis, factor_tol, opts));
  }

  std::complex<long double> product{1.0L, 0.0L};
  for (const auto& fr : factors) product *= fr.value;
  long double err = 0.0L;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    long double contribution = factors[i].err_estimate;
    for (std::size_t j = 0; j < factors.size(); ++j) {
      if (j == i) continue;
      contribution *= std::min<long double>(
          1.0L, std::abs(factors[j].value) + factors[j].err_estimate);
    }
    err += contribution;
  }
  out.value = product;
  out.err_estimate = err;
  out.converged = true;
  out.cells = 0;
  for (const auto& fr : factors) {
    out.converged = out.converged && fr.converged;
    out.cells += fr.cells;
  }
  return out;
}

struct DecayPoint {
  long double t = 0.0L;
  std::complex<long double> value{0.0L, 0.0L};
  long double err = 0.0L;
  long double envelope = 0.0L;  // C * min(1, t^-(R+1)) for the fitted C
  bool excluded = false;
};

struct DecayFit {
  double exponent = 0.0;     // fitted slope of log|I| against log t
  double envelope_c = 0.0;   // e^intercept of the fit
  bool envelope_holds = false;
  int used_points = 0;
  std::vector<DecayPoint> table;
};

// Samples the integral along t * direction, fits the decay exponent on the
// points with nonvanishing magnitude, and compares each against the claimed
// envelope with the fitted prefactor. Zero points are flagged and excluded.
inline DecayFit decay_exponent(const GradedSystem& s,
                               const BlockVector& direction,
                               std::span<const long double> t_values,
                               long double tol, const QuadOptions& opts = {}) {
  if (t_values.size() < 4)
    throw std::invalid_argument("need at least 4 sample points");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0))
      throw std::invalid_argument("sample points must be positive");
    if (i > 0 && t_values[i] <= t_values[i - 1])
      throw std::invalid_argument("sample points must increase");
  }
  if (t_values.back() / t_values.front() < 100.0L * (1.0L - 1e-12L))
    throw std::invalid_argument("sample points must span at least 2 decades");
  long double sup = alpha_norms(direction).sup;
  if (std::fabs(sup - 1.0L) > 1e-9L)
    throw std::invalid_argument("direction must have unit sup norm");

  DecayFit fit;
  fit.table.resize(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    BlockVector tau = direction;
    for (auto& blk : tau.blocks)
      for (auto& v : blk) v *= t_values[i];
    QuadResult q = singular_integral(s, tau, tol, opts);
    DecayPoint& p = fit.table[i];
    p.t = t_values[i];
    p.value = q.value;
    p.err = q.err_estimate;
    long double mag = std::abs(q.value);
    p.excluded = mag < std::max<long double>(1e-10L, 10.0L * q.err_estimate);
  }

  std::vector<double> xs, ys;
  for (const auto& p : fit.table) {
    if (p.excluded) continue;
    xs.push_back(std::log(static_cast<double>(p.t)));
    ys.push_back(std::log(static_cast<double>(std::abs(p.value))));
  }
  fit.used_points = static_cast<int>(xs.size());
  if (fit.used_points < 4)
    throw std::invalid_argument("too few usable points after exclusions");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.exponent = sxy / sxx;
  fit.envelope_c = std::exp(my - fit.exponent * mx);

  const int R = s.total_forms();
  fit.envelope_holds = true;
  for (auto& p : fit.table) {
    long double env = static_cast<long double>(fit.envelope_c) *
                      std::min(1.0L, std::pow(p.t, -(R + 1.0L)));
    p.envelope = env;
    if (!p.excluded && std::abs(p.value) > env * (1.0L + 1e-9L))
      fit.envelope_holds = false;
  }
  return fit;
}

}  // namespace circlesum

#pragma once

// Checker for the multidimensional partial summation identity: the weighted
// lattice sum of f over the box [0,N] equals an alternating combination of
// boundary terms and integrals of mixed partials against the running sum of
// the weight. Both sides are evaluated independently and the relative
// residual is returned.
//
// The integrals reduce, per subset of differentiated axes, to integrals over
// those axes with the remaining coordinates pinned at N_i. The running sum
// is piecewise constant between integer breakpoints, so each integral is
// split into unit cells and handled by a fixed-order Gauss rule; a higher
// order rule provides the convergence estimate.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlesum/parallel.hpp"
#include "circlesum/quadrature.hpp"

namespace circlesum {

// f together with all of its 2^n mixed first partials. `axes_mask` selects
// the differentiated axes (bit i set = one derivative in x_{i+1}).
struct SmoothField {
  int n = 0;
  std::function<std::complex<long double>(unsigned axes_mask,
                                          std::span<const long double>)>
      partial;
};

using LatticeWeight =
    std::function<std::complex<long double>(std::span<const std::int64_t>)>;

class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, std::vector<std::int64_t> cell,
                   long double estimate)
      : std::runtime_error(what), cell_(std::move(cell)), estimate_(estimate) {}
  const std::vector<std::int64_t>& worst_cell() const { return cell_; }
  long double estimate() const { return estimate_; }

 private:
  std::vector<std::int64_t> cell_;
  long double estimate_;
};

struct PartialSumOptions {
  int gauss_order = 8;
  int check_order = 12;
  long double fail_threshold = 1e-9L;  // absolute, against the check rule
};

namespace detail {

// prefix sums of the weight over [0,N]; flat row-major indexing
class WeightPrefix {
 public:
  WeightPrefix(const LatticeWeight& rho, std::span<const std::int64_t> N) {
    n_ = static_cast<int>(N.size());
    dims_.resize(n_);
    stride_.resize(n_);
    std::size_t total = 1;
    for (int i = 0; i < n_; ++i) {
      dims_[i] = static_cast<std::size_t>(N[i]) + 1;
      stride_[i] = total;
      total *= dims_[i];
    }
    table_.resize(total);
    std::vector<std::int64_t> x(n_, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (int i = 0; i < n_; ++i) {
        x[i] = static_cast<std::int64_t>(rest % dims_[i]);
        rest /= dims_[i];
      }
      table_[flat] = rho(x);
    }
    // running sums axis by axis
    for (int axis = 0; axis < n_; ++axis) {
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t coord = (flat / stride_[axis]) % dims_[axis];
        if (coord > 0) table_[flat] += table_[flat - stride_[axis]];
      }
    }
  }

  // sum of rho over 0 <= x <= c componentwise
  std::complex<long double> at(std::span<const std::int64_t> c) const {
    std::size_t flat = 0;
    for (int i = 0; i < n_; ++i)
      flat += static_cast<std::size_t>(c[i]) * stride_[i];
    return table_[flat];
  }

 private:
  int n_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> stride_;
  std::vector<std::complex<long double>> table_;
};

}  // namespace detail

inline long double partial_summation_residual(
    const SmoothField& f, const LatticeWeight& rho,
    std::span<const std::int64_t> N, const PartialSumOptions& opts = {}) {
  const int n = static_cast<int>(N.size());
  if (n < 1 || n > 3)
    throw std::invalid_argument("dimension must lie in [1, 3]");
  if (f.n != n) throw std::invalid_argument("field dimension mismatch");
  for (auto v : N)
    if (v < 0) throw std::invalid_argument("box bounds must be non-negative");

  detail::WeightPrefix prefix(rho, N);

  // left side: direct lattice sum
  std::complex<long double> lhs = 0;
  {
    std::vector<std::int64_t> x(n, 0);
    bool done = false;
    while (!done) {
      std::vector<long double> xr(n);
      for (int i = 0; i < n; ++i) xr[i] = static_cast<long double>(x[i]);
      lhs += f.partial(0, xr) * rho(x);
      int axis = 0;
      while (axis < n) {
        if (++x[axis] <= N[axis]) break;
        x[axis] = 0;
        ++axis;
      }
      done = axis == n;
    }
  }

  const GaussRule& rule = gauss_rule(opts.gauss_order);
  const GaussRule& check = gauss_rule(opts.check_order);

  std::complex<long double> rhs = 0;
  long double worst_cell_estimate = 0.0L;
  std::vector<std::int64_t> worst_cell;

  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> axes;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) axes.push_back(i);

    bool degenerate = false;
    for (int a : axes)
      if (N[a] == 0) degenerate = true;
    if (degenerate) continue;  // zero-width integral

    const int dim = static_cast<int>(axes.size());
    const int sign = (dim % 2 == 0) ? 1 : -1;

    if (dim == 0) {
      std::vector<long double> xr(n);
      std::vector<std::int64_t> xi(n);
      for (int i = 0; i < n; ++i) {
        xr[i] = static_cast<long double>(N[i]);
        xi[i] = N[i];
      }
      rhs += f.partial(0, xr) * prefix.at(xi);
      continue;
    }

    // iterate over unit cells of the integrated axes
    std::vector<std::int64_t> cell(dim, 0);
    std::complex<long double> integral = 0;
    bool cells_done = false;
    while (!cells_done) {
      std::vector<std::int64_t> corner(n);
      std::vector<long double> point(n);
      for (int i = 0; i < n; ++i) {
        corner[i] = N[i];
        point[i] = static_cast<long double>(N[i]);
      }
      for (int k = 0; k < dim; ++k) corner[axes[k]] = cell[k];
      std::complex<long double> tval = prefix.at(corner);

      auto integrate = [&](const GaussRule& r) {
        std::complex<long double> acc = 0;
        std::vector<int> node_index(dim, 0);
        bool nodes_done = false;
        while (!nodes_done) {
          long double w = 1.0L;
          for (int k = 0; k < dim; ++k) {
            int a = axes[k];
            point[a] = cell[k] + 0.5L * (r.nodes[node_index[k]] + 1.0L);
            w *= 0.5L * r.weights[node_index[k]];
          }
          acc += w * f.partial(mask, point);
          int axis = 0;
          while (axis < dim) {
            if (++node_index[axis] < static_cast<int>(r.nodes.size())) break;
            node_index[axis] = 0;
            ++axis;
          }
          nodes_done = axis == dim;
        }
        return acc * tval;
      };

      std::complex<long double> lo = integrate(rule);
      std::complex<long double> hi = integrate(check);
      integral += hi;
      long double est = std::abs(hi - lo);
      if (est > worst_cell_estimate) {
        worst_cell_estimate = est;
        worst_cell.assign(corner.begin(), corner.end());
      }

      int axis = 0;
      while (axis < dim) {
        if (++cell[axis] < N[axes[axis]]) break;
        cell[axis] = 0;
        ++axis;
      }
      cells_done = axis == dim;
    }
    rhs += static_cast<long double>(sign) * integral;
  }

  if (worst_cell_estimate > opts.fail_threshold)
    throw quadrature_error(
        "quadrature failed to converge (worst cell estimate " +
            std::to_string(static_cast<double>(worst_cell_estimate)) + ")",
        worst_cell, worst_cell_estimate);

  long double denom = std::max<long double>(1.0L, std::abs(lhs));
  return std::abs(lhs - rhs) / denom;
}

}  // namespace circlesum

#pragma once

// The linear-block invariant: the minimum number of nonzero coefficients in
// a nontrivial rational combination of the linear forms. Computed exactly by
// ascending support size: a nonzero combination supported inside a column
// set T exists iff the columns outside T drop rank. Scale-invariance lets
// integer arithmetic stand in for rational coefficients throughout.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "circlesum/rank.hpp"
#include "circlesum/system.hpp"

namespace circlesum {

template <typename T = BigInt>
struct LinearBlockT {
  int n = 0;
  std::vector<std::vector<T>> rows;  // r_1 rows of n coefficients
};

using LinearBlock = LinearBlockT<BigInt>;

// coefficient rows of the degree-1 forms of block 1
inline LinearBlock linear_block(const GradedSystem& s) {
  LinearBlock b;
  b.n = s.n;
  for (int r = 1; r <= s.block_size(1); ++r) {
    Polynomial form = s.form(1, r);
    std::vector<BigInt> row(s.n, BigInt(0));
    for (const auto& t : form.terms())
      for (int i = 0; i < s.n; ++i)
        if (t.exponents[i] == 1) row[i] = t.coefficient;
    b.rows.push_back(std::move(row));
  }
  return b;
}

namespace detail {

// rank of the columns outside `support`; `scratch` must be at least
// r x n and is clobbered
template <typename T>
int rank_outside(const LinearBlockT<T>& b, const std::vector<int>& support,
                 std::vector<std::vector<T>>& scratch) {
  std::size_t cols = 0;
  for (int c = 0; c < b.n; ++c) {
    bool in_support = false;
    for (int s : support) in_support = in_support || s == c;
    if (in_support) continue;
    for (std::size_t r = 0; r < b.rows.size(); ++r)
      scratch[r][cols] = b.rows[r][c];
    ++cols;
  }
  return rank_exact_leading(scratch, b.rows.size(), cols);
}

// lexicographic subset enumeration of {0..n-1} of size k
inline bool next_combination(std::vector<int>& comb, int n) {
  int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// std::nullopt encodes +infinity (empty block). Returns 0 iff the rows are
// linearly dependent over Q.
template <typename T>
std::optional<int> b1(const LinearBlockT<T>& block, int max_n = 20) {
  const int r1 = static_cast<int>(block.rows.size());
  if (r1 == 0) return std::nullopt;
  if (block.n > max_n)
    throw std::invalid_argument("variable count exceeds the subset budget of " +
                                std::to_string(max_n));
  for (const auto& row : block.rows)
    if (static_cast<int>(row.size()) != block.n)
      throw std::invalid_argument("row length mismatch");
  std::vector<std::vector<T>> scratch(r1, std::vector<T>(block.n));
  for (int k = 0; k <= block.n; ++k) {
    std::vector<int> support(k);
    for (int i = 0; i < k; ++i) support[i] = i;
    while (true) {
      if (detail::rank_outside(block, support, scratch) < r1) return k;
      if (k == 0 || !detail::next_combination(support, block.n)) break;
    }
  }
  return block.n;  // unreachable: k = n always drops rank
}

// the block with column j (1-based) zeroed; preserves n
template <typename T>
LinearBlockT<T> restrict_column(const LinearBlockT<T>& block, int j) {
  if (j < 1 || j > block.n)
    throw std::invalid_argument("column index out of range");
  LinearBlockT<T> out = block;
  for (auto& row : out.rows) row[j - 1] = T(0);
  return out;
}

// b1 after zeroing column j minus b1 before; at least -1 for every block
template <typename T>
int restriction_gap(const LinearBlockT<T>& block, int j, int max_n = 20) {
  auto before = b1(block, max_n);
  if (!before.has_value())
    throw std::invalid_argument("restriction gap needs a nonempty block");
  auto after = b1(restrict_column(block, j), max_n);
  return *after - *before;
}

}  // namespace circlesum

#pragma once

// Rank over Q of an integer matrix by fraction-free (Bareiss) elimination.
// Never touches floating point; rank deficiency is a knife-edge condition.
//
// The template parameter is the integer scalar. BigInt is always safe;
// fixed-width integers are fine when the caller can bound the growth of the
// 2x2 determinant updates (they stay determinants of submatrices).

#include <cstddef>
#include <utility>
#include <vector>

#include "circlesum/bigint.hpp"

namespace circlesum {

// Eliminates the leading rows x cols block in place (contents are destroyed).
// Subset searches refill one scratch matrix instead of reallocating.
template <typename T>
int rank_exact_leading(std::vector<std::vector<T>>& m, std::size_t rows,
                       std::size_t cols) {
  int rank = 0;
  T prev = T(1);
  for (std::size_t col = 0; col < cols && static_cast<std::size_t>(rank) < rows;
       ++col) {
    std::size_t pivot = rows;
    for (std::size_t r = rank; r < rows; ++r) {
      if (m[r][col] != T(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows) continue;
    if (pivot != static_cast<std::size_t>(rank)) std::swap(m[pivot], m[rank]);
    const std::size_t pr = static_cast<std::size_t>(rank);
    for (std::size_t i = pr + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        m[i][j] = (m[i][j] * m[pr][col] - m[i][col] * m[pr][j]) / prev;
      }
      m[i][col] = T(0);
    }
    prev = m[pr][col];
    ++rank;
  }
  return rank;
}

template <typename T>
int rank_exact(std::vector<std::vector<T>> m) {
  return rank_exact_leading(m, m.size(), m.empty() ? 0 : m[0].size());
}

}  // namespace circlesum

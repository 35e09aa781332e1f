#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnet/types.hpp"

namespace uavnet {

namespace detail {

// Kuhn-Munkres with potentials on a square cost matrix (minimization).
// Returns row -> column matching. O(n^3).
inline std::vector<int> min_cost_square_assignment(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }
  return row_to_col;
}

}  // namespace detail

struct AssignmentResult {
  double value = 0.0;           // sum of weights over matched (row, col) pairs
  std::vector<int> row_to_col;  // -1 when the row is left unmatched
};

// Maximum-weight one-to-one assignment of rows to columns. Rows may stay
// unmatched when there are more rows than columns. Weights must be finite and
// non-negative (matching something never hurts), which holds for rate-derived
// weights.
inline AssignmentResult max_weight_assignment(const Grid<double>& w) {
  const int rows = w.rows();
  const int cols = w.cols();
  if (rows == 0 || cols == 0) return {0.0, std::vector<int>(static_cast<std::size_t>(rows), -1)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!std::isfinite(w(r, c)) || w(r, c) < 0.0) {
        throw std::invalid_argument("max_weight_assignment: weights must be finite and >= 0");
      }
    }
  }
  const int n = std::max(rows, cols);
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = -w(r, c);
  }
  const std::vector<int> match = detail::min_cost_square_assignment(cost);

  AssignmentResult res;
  res.row_to_col.assign(static_cast<std::size_t>(rows), -1);
  for (int r = 0; r < rows; ++r) {
    const int c = match[static_cast<std::size_t>(r)];
    if (c >= 0 && c < cols) res.row_to_col[static_cast<std::size_t>(r)] = c;
  }
  for (int r = 0; r < rows; ++r) {
    if (res.row_to_col[static_cast<std::size_t>(r)] >= 0) {
      res.value += w(r, res.row_to_col[static_cast<std::size_t>(r)]);
    }
  }
  return res;
}

}  // namespace uavnet

// Copyright 2026 The Memtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "memtrack/errors.hpp"

namespace memtrack {

namespace {

// Shortest-augmenting-path Kuhn-Munkres on an n x n cost matrix
// (minimization). Returns row -> col; fills the dual potentials, which
// satisfy u[i] + v[j] <= cost(i, j) with equality on matched edges.
std::vector<int> hungarian_min(const std::vector<double>& cost, int n,
                               std::vector<double>& u_out,
                               std::vector<double>& v_out) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * static_cast<std::size_t>(n) + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  u_out.assign(n, 0.0);
  v_out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) u_out[i] = u[i + 1];
  for (int j = 0; j < n; ++j) v_out[j] = v[j + 1];
  return row_to_col;
}

bool kuhn_augment(int row, const std::vector<std::vector<int>>& adj,
                  std::vector<int>& row_to_col, std::vector<int>& col_to_row,
                  const std::vector<char>& fixed_col,
                  std::vector<char>& visited_col) {
  for (int c : adj[row]) {
    if (fixed_col[c] || visited_col[c]) continue;
    visited_col[c] = 1;
    if (col_to_row[c] == -1 ||
        kuhn_augment(col_to_row[c], adj, row_to_col, col_to_row, fixed_col,
                     visited_col)) {
      row_to_col[row] = c;
      col_to_row[c] = row;
      return true;
    }
  }
  return false;
}

// Rewrites the matching into the lexicographically smallest optimal one.
// Every optimal matching satisfies complementary slackness with the final
// duals, so all optima live inside the tight-edge subgraph; rows are fixed
// in order, preferring real columns (ascending) over padding columns.
std::vector<int> lexicographic_canonicalize(const std::vector<double>& cost,
                                            int n, int real_cols,
                                            std::vector<int> row_to_col,
                                            const std::vector<double>& u,
                                            const std::vector<double>& v) {
  double max_abs = 1.0;
  for (double c : cost) max_abs = std::max(max_abs, std::abs(c));
  const double tol = 1e-9 * max_abs;

  std::vector<std::vector<int>> adj(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double reduced = cost[r * static_cast<std::size_t>(n) + c] - u[r] - v[c];
      if (std::abs(reduced) <= tol) adj[r].push_back(c);
    }
    const int matched = row_to_col[r];
    auto it = std::lower_bound(adj[r].begin(), adj[r].end(), matched);
    if (it == adj[r].end() || *it != matched) adj[r].insert(it, matched);
    if (real_cols < n) {
      std::stable_partition(adj[r].begin(), adj[r].end(),
                            [real_cols](int c) { return c < real_cols; });
    }
  }

  std::vector<int> col_to_row(n, -1);
  for (int r = 0; r < n; ++r) col_to_row[row_to_col[r]] = r;
  std::vector<char> fixed_col(n, 0);
  std::vector<char> visited_col(n, 0);

  for (int r = 0; r < n; ++r) {
    for (int c : adj[r]) {
      if (fixed_col[c]) continue;
      if (row_to_col[r] == c) {
        fixed_col[c] = 1;
        break;
      }
      const int displaced = col_to_row[c];
      const int old_c = row_to_col[r];
      row_to_col[r] = c;
      col_to_row[c] = r;
      row_to_col[displaced] = -1;
      col_to_row[old_c] = -1;
      std::fill(visited_col.begin(), visited_col.end(), 0);
      visited_col[c] = 1;
      if (kuhn_augment(displaced, adj, row_to_col, col_to_row, fixed_col,
                       visited_col)) {
        fixed_col[c] = 1;
        break;
      }
      row_to_col[r] = old_c;
      col_to_row[old_c] = r;
      row_to_col[displaced] = c;
      col_to_row[c] = displaced;
    }
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const WeightMatrix& weights) {
  const int rows = weights.rows();
  const int cols = weights.cols();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (!std::isfinite(weights(r, c)))
        throw ValidationError("invalid matrix: non-finite weight at (" +
                              std::to_string(r) + ", " + std::to_string(c) + ")");

  Assignment result;
  if (rows == 0 || cols == 0) return result;

  // Pad to square; padding cost 0 contributes a constant to every matching.
  const int n = std::max(rows, cols);
  std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      cost[r * static_cast<std::size_t>(n) + c] = -weights(r, c);

  std::vector<double> u, v;
  std::vector<int> matched = hungarian_min(cost, n, u, v);
  std::vector<int> canonical =
      lexicographic_canonicalize(cost, n, cols, matched, u, v);

  auto real_total = [&](const std::vector<int>& row_to_col) {
    double total = 0.0;
    for (int r = 0; r < rows; ++r) {
      const int c = row_to_col[r];
      if (c < cols) total += weights(r, c);
    }
    return total;
  };

  // Adopt the canonical matching only when it provably costs the same;
  // the tight-edge tolerance must never change the optimum.
  const std::vector<int>& chosen =
      real_total(canonical) == real_total(matched) ? canonical : matched;

  for (int r = 0; r < rows; ++r) {
    const int c = chosen[r];
    if (c < cols) {
      result.pairs.emplace_back(r, c);
      result.total += weights(r, c);
    }
  }
  return result;
}

}  // namespace memtrack

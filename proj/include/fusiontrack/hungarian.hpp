// Copyright 2026 The FusionTrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSIONTRACK__HUNGARIAN_HPP_
#define FUSIONTRACK__HUNGARIAN_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace fusiontrack
{

/// Cost entry marking a pair that must not be associated.
inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

struct Assignment
{
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

namespace detail
{

/// Matching quality: more finite pairs first, then lower total cost.
struct MatchObjective
{
  int finite_pairs = 0;
  double cost = 0.0;

  bool same_as(const MatchObjective & o) const
  {
    return finite_pairs == o.finite_pairs &&
           std::abs(cost - o.cost) <= 1e-9 * std::max({1.0, std::abs(cost), std::abs(o.cost)});
  }
};

/// Classic O(n^2 m) shortest augmenting path solver for n <= m on a dense finite matrix.
/// Returns the column assigned to each row.
inline std::vector<int> solve_dense_rows_le_cols(const Eigen::MatrixXd & a)
{
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(m + 1), 0);
  std::vector<int> way(static_cast<std::size_t>(m + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          continue;
        }
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }
  return row_to_col;
}

/// Optimal objective over a matrix with infinite sentinels; sentinel pairs count as unmatched.
inline MatchObjective solve_objective(const Eigen::MatrixXd & costs, std::vector<int> * row_to_col = nullptr)
{
  const auto r = costs.rows();
  const auto c = costs.cols();
  if (r == 0 || c == 0) {
    if (row_to_col) row_to_col->assign(static_cast<std::size_t>(r), -1);
    return {};
  }
  double finite_sum = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      if (std::isfinite(costs(i, j))) finite_sum += std::abs(costs(i, j));
    }
  }
  // Any sentinel outweighs every combination of finite entries.
  const double big = 1.0 + 2.0 * finite_sum;
  Eigen::MatrixXd a = costs.unaryExpr([big](double x) { return std::isfinite(x) ? x : big; });
  const bool transposed = r > c;
  if (transposed) {
    a.transposeInPlace();
  }
  const auto assign = solve_dense_rows_le_cols(a);
  std::vector<int> rc(static_cast<std::size_t>(r), -1);
  for (std::size_t k = 0; k < assign.size(); ++k) {
    if (assign[k] < 0) continue;
    const int row = transposed ? assign[k] : static_cast<int>(k);
    const int col = transposed ? static_cast<int>(k) : assign[k];
    if (std::isfinite(costs(row, col))) {
      rc[static_cast<std::size_t>(row)] = col;
    }
  }
  MatchObjective obj;
  for (Eigen::Index i = 0; i < r; ++i) {
    if (rc[static_cast<std::size_t>(i)] >= 0) {
      ++obj.finite_pairs;
      obj.cost += costs(i, rc[static_cast<std::size_t>(i)]);
    }
  }
  if (row_to_col) *row_to_col = std::move(rc);
  return obj;
}

inline Eigen::MatrixXd submatrix(
  const Eigen::MatrixXd & m, const std::vector<int> & rows, const std::vector<int> & cols)
{
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

/// Lexicographically smallest optimal matching of one connected block.
inline std::vector<std::pair<int, int>> solve_block(
  const Eigen::MatrixXd & costs, const std::vector<int> & rows, const std::vector<int> & cols)
{
  const Eigen::MatrixXd block = submatrix(costs, rows, cols);
  const MatchObjective best = solve_objective(block);

  std::vector<std::pair<int, int>> pairs;
  std::vector<char> col_used(cols.size(), 0);
  MatchObjective fixed;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<int> rest_rows;
    for (std::size_t k = i + 1; k < rows.size(); ++k) rest_rows.push_back(static_cast<int>(k));
    bool placed = false;
    for (std::size_t j = 0; j < cols.size() && !placed; ++j) {
      const double cij = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (col_used[j] || !std::isfinite(cij)) continue;
      std::vector<int> rest_cols;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (!col_used[k] && k != j) rest_cols.push_back(static_cast<int>(k));
      }
      MatchObjective trial = solve_objective(submatrix(block, rest_rows, rest_cols));
      trial.finite_pairs += fixed.finite_pairs + 1;
      trial.cost += fixed.cost + cij;
      if (trial.same_as(best)) {
        col_used[j] = 1;
        fixed.finite_pairs += 1;
        fixed.cost += cij;
        pairs.emplace_back(rows[i], cols[j]);
        placed = true;
      }
    }
  }
  return pairs;
}

}  // namespace detail

/// Minimum-cost assignment. Pairs with infinite cost are never produced; among matchings
/// with the most feasible pairs, total cost is minimal, and ties resolve to the
/// lexicographically smallest pair list.
inline Assignment hungarian(const Eigen::MatrixXd & costs)
{
  const int n = static_cast<int>(costs.rows());
  const int m = static_cast<int>(costs.cols());

  // Split into independent blocks linked by feasible entries (union-find over rows + cols).
  std::vector<int> parent(static_cast<std::size_t>(n + m));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (std::isfinite(costs(i, j))) {
        const int a = find(i);
        const int b = find(n + j);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> block_rows(static_cast<std::size_t>(n + m));
  std::vector<std::vector<int>> block_cols(static_cast<std::size_t>(n + m));
  for (int i = 0; i < n; ++i) block_rows[static_cast<std::size_t>(find(i))].push_back(i);
  for (int j = 0; j < m; ++j) block_cols[static_cast<std::size_t>(find(n + j))].push_back(j);

  Assignment out;
  for (std::size_t b = 0; b < block_rows.size(); ++b) {
    if (block_rows[b].empty() || block_cols[b].empty()) continue;
    auto pairs = detail::solve_block(costs, block_rows[b], block_cols[b]);
    out.pairs.insert(out.pairs.end(), pairs.begin(), pairs.end());
  }
  std::sort(out.pairs.begin(), out.pairs.end());

  std::vector<char> row_used(static_cast<std::size_t>(n), 0);
  std::vector<char> col_used(static_cast<std::size_t>(m), 0);
  for (const auto & [r, c] : out.pairs) {
    row_used[static_cast<std::size_t>(r)] = 1;
    col_used[static_cast<std::size_t>(c)] = 1;
    out.total_cost += costs(r, c);
  }
  for (int i = 0; i < n; ++i) if (!row_used[static_cast<std::size_t>(i)]) out.unmatched_rows.push_back(i);
  for (int j = 0; j < m; ++j) if (!col_used[static_cast<std::size_t>(j)]) out.unmatched_cols.push_back(j);
  return out;
}

}  // namespace fusiontrack

#endif  // FUSIONTRACK__HUNGARIAN_HPP_

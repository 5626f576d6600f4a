#include "pscm/matching.hpp"

#include <functional>
#include <limits>
#include <queue>

namespace pscm {

BipartiteMatching hopcroft_karp(int n_rows, int n_cols, const std::vector<IndexSet>& adj) {
  if (static_cast<int>(adj.size()) != n_rows)
    throw internal_error("adjacency size does not match row count");
  constexpr int kInf = std::numeric_limits<int>::max();
  BipartiteMatching result;
  result.row_match.assign(n_rows, -1);
  result.col_match.assign(n_cols, -1);
  std::vector<int> dist(n_rows);

  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int r = 0; r < n_rows; ++r) {
      if (result.row_match[r] < 0) {
        dist[r] = 0;
        q.push(r);
      } else {
        dist[r] = kInf;
      }
    }
    while (!q.empty()) {
      int r = q.front();
      q.pop();
      for (int c : adj[r]) {
        int r2 = result.col_match[c];
        if (r2 < 0) {
          found = true;
        } else if (dist[r2] == kInf) {
          dist[r2] = dist[r] + 1;
          q.push(r2);
        }
      }
    }
    return found;
  };

  std::function<bool(int)> dfs = [&](int r) {
    for (int c : adj[r]) {
      int r2 = result.col_match[c];
      if (r2 < 0 || (dist[r2] == dist[r] + 1 && dfs(r2))) {
        result.row_match[r] = c;
        result.col_match[c] = r;
        return true;
      }
    }
    dist[r] = kInf;
    return false;
  };

  while (bfs())
    for (int r = 0; r < n_rows; ++r)
      if (result.row_match[r] < 0 && dfs(r)) ++result.size;
  return result;
}

IndexSet deficient_row_set(int n_rows, int n_cols, const std::vector<IndexSet>& adj,
                           const BipartiteMatching& matching) {
  if (matching.size >= n_rows) return {};
  std::vector<bool> row_seen(n_rows, false), col_seen(n_cols, false);
  std::queue<int> q;
  for (int r = 0; r < n_rows; ++r)
    if (matching.row_match[r] < 0) {
      row_seen[r] = true;
      q.push(r);
    }
  // Alternating reachability: any edge leaves a row, only matching edges
  // leave a column. The reachable rows form a set with too few neighbours.
  while (!q.empty()) {
    int r = q.front();
    q.pop();
    for (int c : adj[r]) {
      if (col_seen[c]) continue;
      col_seen[c] = true;
      int r2 = matching.col_match[c];
      if (r2 >= 0 && !row_seen[r2]) {
        row_seen[r2] = true;
        q.push(r2);
      }
    }
  }
  IndexSet out;
  for (int r = 0; r < n_rows; ++r)
    if (row_seen[r]) out.push_back(r);
  return out;
}

std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw internal_error("assignment needs a square cost matrix");
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with row/column potentials; indices are
  // 1-based with column 0 as the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace pscm

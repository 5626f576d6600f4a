#pragma once

#include <vector>

#include "pscm/types.hpp"

namespace pscm {

struct BipartiteMatching {
  int size = 0;
  std::vector<int> row_match;  // row -> col or -1
  std::vector<int> col_match;  // col -> row or -1
};

// Hopcroft-Karp maximum matching. adj[r] lists the columns reachable from
// row r, each list sorted ascending.
BipartiteMatching hopcroft_karp(int n_rows, int n_cols, const std::vector<IndexSet>& adj);

// A set D of rows with |N(D)| < |D|, derived from a maximum matching by
// alternating-path reachability from the unmatched rows. Empty when the
// matching saturates the rows.
IndexSet deficient_row_set(int n_rows, int n_cols, const std::vector<IndexSet>& adj,
                           const BipartiteMatching& matching);

// Minimum-cost assignment on a square cost matrix, O(n^3). Returns the
// column assigned to each row.
std::vector<int> hungarian(const Matrix& cost);

}  // namespace pscm

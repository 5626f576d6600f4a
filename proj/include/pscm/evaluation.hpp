#pragma once

#include <string>
#include <vector>

#include "pscm/types.hpp"

namespace pscm {

struct MetricsReport {
  int true_edges = 0;
  int recovered_edges = 0;
  double shd = 0.0;
  double shd_per_edge = 0.0;
  bool shd_per_edge_defined = true;  // false when the true graph has no edges
  double precision = 1.0;            // 1 when nothing was recovered
  double recall = 1.0;               // 1 when nothing was there to recover
  double frobenius = 0.0;
};

// Directed-support comparison of two adjacency matrices at a threshold.
MetricsReport compare_adjacency(const Matrix& A_true, const Matrix& A_hat, double threshold);

struct BMatchReport {
  std::vector<int> permutation;  // estimated column j matches true column permutation[j]
  double frobenius = 0.0;        // after normalization and matching
  Matrix aligned;                // estimate with columns permuted onto the truth
};

// Column-permutation-invariant comparison of exogenous mixtures: normalize
// both matrices column-wise, then match columns by minimum total squared
// distance.
BMatchReport match_B(const Matrix& B_true, const Matrix& B_hat);

// Whether the estimated mixing supports can be matched one-to-one onto the
// true ones. Columns are normalized before thresholding.
bool ica_success(const Matrix& W_true, const Matrix& W_hat, double threshold);

std::string metrics_to_json_string(const MetricsReport& metrics);
std::string metrics_to_csv_line(const MetricsReport& metrics);

}  // namespace pscm

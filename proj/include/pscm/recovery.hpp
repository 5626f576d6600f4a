#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pscm/model.hpp"
#include "pscm/types.hpp"

namespace pscm {

struct RecoveryConfig {
  double eps = 1e-9;            // support threshold on the mixing estimate
  double prune_threshold = 0.1; // applied to A_hat for edge decisions
  // Relative residual allowed in the least-squares branch before the input
  // is declared inconsistent with the model class. Infinite by default.
  double ls_residual_tol = std::numeric_limits<double>::infinity();
  // Keep going on rank-deficient least-squares systems (minimum-norm
  // solution) instead of failing. Off by default.
  bool best_effort = false;
  bool randomize_ties = false;  // break equal-support-size ties randomly
  std::uint64_t tie_seed = 0;
};

struct ParentEstimate {
  int k = -1;       // child, original row index
  int parent = -1;  // original row index
  double value = 0.0;
  std::string method;       // "unique" or "least-squares"
  int layer = 0;            // peeling round for unique estimates
  double discrepancy = 0.0; // max spread across multiple unique components
  double residual = 0.0;    // relative residual of the least-squares solve
};

struct RecoveryResult {
  std::vector<int> order_used;  // original row indices, processing order
  Matrix total_effects;         // cumulative effects, unit diagonal
  Matrix A_hat;                 // direct effects, zero diagonal
  Matrix B_hat;                 // exogenous mixture estimate
  std::vector<ParentEstimate> diagnostics;
  std::vector<std::string> warnings;
  // Working-row support size after each subtraction, per processed variable.
  std::vector<std::vector<int>> support_trace;
};

// Sort rows by ascending support size; ties stay in input order unless
// randomized.
std::vector<int> infer_causal_order(const MixingMatrix& mixing);
std::vector<int> infer_causal_order(const MixingMatrix& mixing, bool randomize_ties,
                                    std::uint64_t tie_seed);

// Structure recovery from a column-scrambled mixing estimate. Returns the
// model in the caller's row indexing.
RecoveryResult recover(const MixingMatrix& mixing, const RecoveryConfig& cfg = {});

Matrix prune_adjacency(const Matrix& A_hat, double threshold);

// Pass a finite prune threshold to include the pruned adjacency in the
// output.
std::string recovery_result_to_json_string(
    const RecoveryResult& result,
    double prune_threshold = std::numeric_limits<double>::quiet_NaN());

}  // namespace pscm

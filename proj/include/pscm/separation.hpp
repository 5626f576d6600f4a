#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pscm/model.hpp"
#include "pscm/types.hpp"

namespace pscm {

struct IcaConfig {
  int m = 0;                        // components to extract, 0 = all rows
  std::string contrast = "logcosh"; // or "cube"
  int max_iter = 500;
  double conv_tol = 1e-6;
  std::uint64_t seed = 0;
};

struct IcaResult {
  MixingMatrix mixing;
  bool converged = true;
  std::vector<std::string> warnings;
};

// Deflation FastICA on centred, whitened data. The returned mixing matrix
// maps estimated sources back to the observed variables; columns carry
// arbitrary order, sign and scale.
IcaResult fastica(const Dataset& data, const IcaConfig& cfg);

struct BootstrapConfig {
  int n_boot = 50;
  double confidence = 0.95;
};

struct BootstrapResult {
  MixingMatrix mixing;
  std::vector<std::vector<bool>> kept_mask;  // p x m, false = entry forced to zero
  int replicates_used = 0;
  std::vector<std::string> warnings;
};

// Column-resampled ICA replicates, aligned and averaged; entries whose
// t-interval covers zero are set to exact zeros.
BootstrapResult bootstrap_prune(const Dataset& data, const IcaConfig& ica_cfg,
                                const BootstrapConfig& boot_cfg);

// Alignment + averaging + t-pruning step on precomputed replicate estimates,
// exposed so the aggregation contract can be tested on its own.
Matrix aggregate_bootstrap(const std::vector<Matrix>& estimates, double confidence,
                           std::vector<std::vector<bool>>* kept_mask = nullptr);

// Per-column normalization used before aggregation: divide by the largest
// absolute entry and make that entry positive. Zero columns pass through.
Matrix normalize_columns(const Matrix& w);

// Ground-truth mixing with the column order and scales an oblivious
// separation stage would lose.
MixingMatrix oracle_mixing(const Pscm& model, std::uint64_t seed, double eps = 1e-9);

}  // namespace pscm

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pscm/types.hpp"

namespace pscm {

enum class SourceDist { uniform, gaussian, laplace };

SourceDist source_dist_from_string(const std::string& name);
std::string to_string(SourceDist dist);

struct GenerationConfig {
  int p = 0;
  int m = 0;
  double causal_degree = 1.5;     // expected number of causal neighbours per variable
  double exogenous_degree = 1.5;  // expected number of observed children per source
  double coeff_lo = 0.5;          // coefficient magnitudes are uniform on [lo,hi]
  double coeff_hi = 1.0;
  bool distinct_source = false;   // reserve one private source per observed variable
  std::uint64_t seed = 0;
};

// Linear propagation structural causal model X = A X + B S. A is strictly
// lower triangular once rows and columns are permuted by `order`.
struct Pscm {
  int p = 0;
  int m = 0;
  Matrix A;                // p x p causal coefficients
  Matrix B;                // p x m exogenous coefficients
  std::vector<int> order;  // order[t] = variable placed at causal position t
  std::uint64_t seed = 0;
  int generation_rejections = 0;
  std::optional<GenerationConfig> config;
};

// Observed-variable to source mixing, W = (I - A)^{-1} B. Supports are read
// at threshold eps.
struct MixingMatrix {
  Matrix W;
  double eps = 1e-9;
};

struct Dataset {
  Matrix X;  // p rows, one column per sample
  std::string source_dist = "uniform";
};

struct AssumptionIssue {
  std::string what;
  int i = -1;
  int j = -1;
};

struct AssumptionsReport {
  bool model_valid = true;
  bool edge_supports_ok = true;       // every causal edge strictly grows the source support
  bool ancestor_supports_ok = true;   // ancestor supports nested in descendant supports
  bool generic_rank_ok = true;        // random square submatrices of B are full rank
  std::vector<AssumptionIssue> issues;
  bool overall() const {
    return model_valid && edge_supports_ok && ancestor_supports_ok && generic_rank_ok;
  }
};

// Shape, order and sparsity invariants. Throws a model error on violation.
void validate_model(const Pscm& model, double eps = 1e-9);

MixingMatrix mixing_matrix(const Pscm& model, double eps = 1e-9);

Pscm generate_random_model(const GenerationConfig& cfg);

Dataset simulate(const Pscm& model, int n, SourceDist dist, std::uint64_t seed);

// Random column permutation and per-column scaling with magnitude in
// [0.5, 2], random sign. Models what a source-separation front end loses.
MixingMatrix scramble(const MixingMatrix& mixing, std::uint64_t seed);

AssumptionsReport check_assumptions(const Pscm& model, double eps = 1e-9);

std::string model_to_json_string(const Pscm& model);
Pscm model_from_json_string(const std::string& text, const std::string& origin = "<string>");
void write_model_file(const std::string& path, const Pscm& model);
Pscm read_model_file(const std::string& path);

void write_dataset_file(const std::string& path, const Dataset& data);
Dataset read_dataset_file(const std::string& path);

}  // namespace pscm

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pscm/model.hpp"
#include "pscm/types.hpp"

namespace pscm {

// Variables whose source support is a strict subset of the target's.
struct PossibleParentSet {
  int target = -1;
  IndexSet members;
};

PossibleParentSet possible_parents(const MixingMatrix& mixing, int k);

// One mixture per candidate variable: (variable index, source support).
using MixtureList = std::vector<std::pair<int, IndexSet>>;

// Iterative peeling of mixtures that own sources no other remaining mixture
// contains. layers[n] lists (variable, unique sources) removed at round n+1;
// residual holds the variables never removed.
struct UniqueComponentLayers {
  std::vector<std::vector<std::pair<int, IndexSet>>> layers;
  IndexSet residual;
  std::vector<IndexSet> iterations;  // J^(0), J^(1), ... for diagnostics
};

UniqueComponentLayers unique_component_layers(const MixtureList& mixtures);

struct ConditionWitness {
  bool present = false;
  int source = -1;    // offending source index
  int variable = -1;  // offending possible parent
  IndexSet subset;    // offending candidate subset, for coverage failures
  std::string text;
};

// Target's own sources must avoid every unique-component set and every
// residual mixture.
struct UniqueComponentsVerdict {
  bool ok = true;
  ConditionWitness witness;
};

UniqueComponentsVerdict check_unique_components_condition(const IndexSet& target_sources,
                                                          const UniqueComponentLayers& layers,
                                                          const MixtureList& mixtures);

enum class MarriageMethod { hall, rank, both };

struct MarriageVerdict {
  bool ok = true;
  ConditionWitness witness;
};

// Every subset of rows of B_k must cover at least as many sources as it has
// rows. hall runs Hopcroft-Karp on the support pattern; rank tests numerical
// row rank; both cross-checks the two and throws on disagreement.
MarriageVerdict check_marriage_condition(const Matrix& B_k, MarriageMethod method, double eps,
                                         double rank_tol = 1e-8);

// Exhaustive subset enumeration, usable up to 12 rows. Returns the smallest
// violating subset, preferring lexicographically smaller ones.
MarriageVerdict marriage_exhaustive(const Matrix& B_k, double eps);

enum class VerifyVariant { paper, full };

struct VariableConditionResult {
  int k = -1;
  bool unique_ok = true;
  bool marriage_ok = true;
  // First failure found, if any: offending source/parent for unique-component
  // violations, offending row subset for coverage violations.
  int witness_source = -1;
  int witness_variable = -1;
  IndexSet witness_subset;
  std::string witness;
};

struct ConditionReport {
  bool overall = true;
  VerifyVariant variant = VerifyVariant::full;
  std::vector<VariableConditionResult> per_variable;
};

// Thrown when a causal edge of the model contradicts the nested-support
// requirement; carries the partial report for the variables already checked.
class EdgeSupportViolation : public Error {
 public:
  EdgeSupportViolation(const std::string& msg, int child, int parent, ConditionReport partial)
      : Error(ErrorKind::model, msg), child_(child), parent_(parent), partial_(std::move(partial)) {}
  int child() const { return child_; }
  int parent() const { return parent_; }
  const ConditionReport& partial() const { return partial_; }

 private:
  int child_;
  int parent_;
  ConditionReport partial_;
};

// variant=paper keeps the weaker per-variable check used for reproducing
// published satisfiability statistics: the residual rows only need enough
// nonzero columns. variant=full runs the complete subset-coverage test over
// all possible parents.
ConditionReport verify_model(const Pscm& model, VerifyVariant variant, double eps = 1e-9,
                             MarriageMethod method = MarriageMethod::hall);

struct DistinctSourceVerdict {
  bool ok = true;
  ConditionWitness witness;
  std::vector<std::string> notes;
};

// Fast screen for models where every observed variable owns a private
// source: each (source, variable) exogenous link must see either zero or at
// least two possible parents holding that source.
DistinctSourceVerdict check_distinct_source_condition(const Pscm& model, double eps = 1e-9);

std::string condition_report_to_json_string(const ConditionReport& report);

}  // namespace pscm

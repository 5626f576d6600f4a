#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pscm/identifiability.hpp"
#include "pscm/model.hpp"
#include "pscm/types.hpp"

namespace pscm {

// Canonical experiment settings. ratio r = m/p applies where m is not fixed
// by the setting.
enum class Setting { equal, fewer, distinct, non_unique };

Setting setting_from_string(const std::string& name);
std::string to_string(Setting s);

// Resolve a setting at a given p (and optional ratio override) into a
// generation config.
GenerationConfig setting_config(Setting s, int p, std::optional<double> ratio,
                                std::optional<double> d_e, std::optional<double> d_o);

struct GridPoint {
  int p = 0;
  double ratio = 1.0;
  double d_e = 1.5;
  double d_o = 1.5;
};

// Grid strings look like "p=5..10;r=0.8..2.6:0.2" or "p=10;r=1.0,2.4".
std::vector<GridPoint> parse_grid(const std::string& text, Setting setting);

struct SatisfiabilityTrial {
  GridPoint point;
  int trial = 0;
  std::uint64_t seed = 0;
  long long attempts = 0;
  bool censored = false;  // attempt cap hit before a satisfying model appeared
  double wall_ms = 0.0;
};

struct SatisfiabilityAggregate {
  GridPoint point;
  int trials = 0;
  int censored = 0;
  double mean_attempts = 0.0;
  double stddev_attempts = 0.0;
  double mean_log10_attempts = 0.0;
};

struct SatisfiabilityExperiment {
  Setting setting = Setting::equal;
  VerifyVariant variant = VerifyVariant::full;
  std::vector<GridPoint> grid;
  int trials = 100;
  long long attempt_cap = 1000000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SatisfiabilityOutcome {
  std::vector<SatisfiabilityTrial> trials;
  std::vector<SatisfiabilityAggregate> aggregates;
};

SatisfiabilityOutcome run_satisfiability_experiment(const SatisfiabilityExperiment& spec);

// Count models drawn until one passes verification. Returns the satisfying
// model unless the cap censors the search.
struct SatisfyingDraw {
  long long attempts = 0;
  bool censored = false;
  std::optional<Pscm> model;
};

SatisfyingDraw draw_satisfying_model(const GenerationConfig& base, VerifyVariant variant,
                                     std::uint64_t seed, long long attempt_cap,
                                     bool want_violating = false);

enum class MixingMode { oracle, ica };

struct RecoveryTrial {
  GridPoint point;
  int trial = 0;
  std::uint64_t seed = 0;
  long long attempts = 0;
  bool generated = false;
  bool ica_ok = false;
  bool recovered = false;
  double shd = 0.0;
  double shd_per_edge = 0.0;
  bool shd_per_edge_defined = true;
  double precision = 1.0;
  double recall = 1.0;
  double frobenius_a = 0.0;
  double frobenius_b = 0.0;
  std::string error;
  double wall_ms = 0.0;
};

struct RecoveryAggregate {
  GridPoint point;
  int trials = 0;
  int ica_successes = 0;
  int recovered = 0;
  // Over all completed trials and over the ica-successful subset; both
  // denominators are reported.
  double mean_shd_per_edge_all = 0.0;
  double mean_shd_per_edge_success = 0.0;
  double exact_rate_all = 0.0;      // fraction with SHD 0 over completed trials
  double exact_rate_success = 0.0;  // fraction with SHD 0 over ica successes
};

struct RecoveryExperiment {
  Setting setting = Setting::equal;
  MixingMode mode = MixingMode::oracle;
  std::vector<GridPoint> grid;
  int trials = 100;
  int n_samples = 1000;
  int n_boot = 50;
  double confidence = 0.95;
  double prune_threshold = 0.1;
  double eps = 1e-9;
  long long attempt_cap = 1000000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct RecoveryOutcome {
  std::vector<RecoveryTrial> trials;
  std::vector<RecoveryAggregate> aggregates;
};

RecoveryOutcome run_recovery_experiment(const RecoveryExperiment& spec);

std::string satisfiability_trials_csv(const SatisfiabilityOutcome& outcome);
std::string satisfiability_aggregates_json(const SatisfiabilityOutcome& outcome);
std::string recovery_trials_csv(const RecoveryOutcome& outcome);
std::string recovery_aggregates_json(const RecoveryOutcome& outcome);

// Rebuild aggregates from per-trial records, for round-trip checks.
std::vector<SatisfiabilityAggregate> aggregate_satisfiability(
    const std::vector<SatisfiabilityTrial>& trials);
std::vector<RecoveryAggregate> aggregate_recovery(const std::vector<RecoveryTrial>& trials);

}  // namespace pscm

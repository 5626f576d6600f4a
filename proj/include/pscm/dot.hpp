#pragma once

#include <string>
#include <vector>

#include "pscm/model.hpp"
#include "pscm/recovery.hpp"

namespace pscm {

// Graphviz rendering: observed variables as circles, sources as squares,
// causal edges solid, exogenous edges dashed. Output is deterministic.
std::string model_to_dot(const Pscm& model, double eps = 1e-9,
                         const std::vector<std::string>& names = {});

// Recovered causal graph after pruning. Sources are included only on request
// since their scales are not meaningful.
std::string recovery_to_dot(const RecoveryResult& result, double prune_threshold,
                            const std::vector<std::string>& names = {},
                            bool include_sources = false, double eps = 1e-9);

}  // namespace pscm

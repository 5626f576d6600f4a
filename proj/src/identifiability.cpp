#include "pscm/identifiability.hpp"

#include <algorithm>
#include <bit>
#include <nlohmann/json.hpp>
#include <numeric>

#include "pscm/matching.hpp"
#include "pscm/support.hpp"

namespace pscm {

namespace {

std::string var_name(int i) { return "x" + std::to_string(i + 1); }
std::string src_name(int j) { return "s" + std::to_string(j + 1); }

std::vector<IndexSet> row_supports(const Matrix& m, double eps) {
  std::vector<IndexSet> out(m.rows());
  for (int i = 0; i < m.rows(); ++i) out[i] = row_support(m.row(i), eps);
  return out;
}

// Ascending support size, ties by index.
std::vector<int> sparsity_order(const std::vector<IndexSet>& supports) {
  std::vector<int> idx(supports.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return supports[a].size() < supports[b].size();
  });
  return idx;
}

}  // namespace

PossibleParentSet possible_parents(const MixingMatrix& mixing, int k) {
  const int p = static_cast<int>(mixing.W.rows());
  if (k < 0 || k >= p) throw config_error("variable index out of range");
  auto supports = row_supports(mixing.W, mixing.eps);
  PossibleParentSet out;
  out.target = k;
  for (int i = 0; i < p; ++i)
    if (i != k && is_strict_subset(supports[i], supports[k])) out.members.push_back(i);
  return out;
}

UniqueComponentLayers unique_component_layers(const MixtureList& mixtures) {
  UniqueComponentLayers out;
  std::vector<int> active(mixtures.size());
  std::iota(active.begin(), active.end(), 0);

  auto ids_of = [&](const std::vector<int>& positions) {
    IndexSet ids;
    for (int pos : positions) ids.push_back(mixtures[pos].first);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  out.iterations.push_back(ids_of(active));

  while (!active.empty()) {
    std::vector<int> staying;
    std::vector<std::pair<int, IndexSet>> leaving;
    for (int pos : active) {
      IndexSet others;
      for (int other : active)
        if (other != pos) others = set_union(others, mixtures[other].second);
      IndexSet unique = set_minus(mixtures[pos].second, others);
      if (unique.empty())
        staying.push_back(pos);
      else
        leaving.emplace_back(mixtures[pos].first, std::move(unique));
    }
    if (leaving.empty()) break;
    out.layers.push_back(std::move(leaving));
    active = std::move(staying);
    out.iterations.push_back(ids_of(active));
  }
  out.residual = ids_of(active);
  return out;
}

UniqueComponentsVerdict check_unique_components_condition(const IndexSet& target_sources,
                                                          const UniqueComponentLayers& layers,
                                                          const MixtureList& mixtures) {
  UniqueComponentsVerdict verdict;
  for (const auto& layer : layers.layers)
    for (const auto& [var, unique] : layer) {
      IndexSet clash = set_intersect(target_sources, unique);
      if (!clash.empty()) {
        verdict.ok = false;
        verdict.witness.present = true;
        verdict.witness.source = clash.front();
        verdict.witness.variable = var;
        verdict.witness.text = "source " + src_name(clash.front()) +
                               " is a unique component of possible parent " + var_name(var);
        return verdict;
      }
    }
  for (int var : layers.residual) {
    auto it = std::find_if(mixtures.begin(), mixtures.end(),
                           [&](const auto& mix) { return mix.first == var; });
    if (it == mixtures.end()) throw internal_error("residual variable missing from mixtures");
    IndexSet clash = set_intersect(target_sources, it->second);
    if (!clash.empty()) {
      verdict.ok = false;
      verdict.witness.present = true;
      verdict.witness.source = clash.front();
      verdict.witness.variable = var;
      verdict.witness.text = "source " + src_name(clash.front()) +
                             " is shared with residual possible parent " + var_name(var);
      return verdict;
    }
  }
  return verdict;
}

namespace {

MarriageVerdict marriage_hall(const Matrix& B_k, double eps) {
  const int r = static_cast<int>(B_k.rows());
  const int c = static_cast<int>(B_k.cols());
  std::vector<IndexSet> adj(r);
  for (int i = 0; i < r; ++i) adj[i] = row_support(B_k.row(i), eps);
  auto matching = hopcroft_karp(r, c, adj);
  MarriageVerdict verdict;
  if (matching.size < r) {
    verdict.ok = false;
    verdict.witness.present = true;
    verdict.witness.subset = deficient_row_set(r, c, adj, matching);
    verdict.witness.text = "rows with too few sources";
  }
  return verdict;
}

MarriageVerdict marriage_rank(const Matrix& B_k, double eps, double rank_tol) {
  (void)eps;
  const int r = static_cast<int>(B_k.rows());
  MarriageVerdict verdict;
  if (r == 0) return verdict;
  Eigen::JacobiSVD<Matrix> svd(B_k);
  const auto& sv = svd.singularValues();
  double top = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * top) ++rank;
  if (top == 0.0) rank = 0;
  if (rank < r) {
    verdict.ok = false;
    verdict.witness.present = true;
    verdict.witness.text = "row rank " + std::to_string(rank) + " below " + std::to_string(r);
  }
  return verdict;
}

}  // namespace

MarriageVerdict check_marriage_condition(const Matrix& B_k, MarriageMethod method, double eps,
                                         double rank_tol) {
  if (B_k.rows() == 0) return {};
  switch (method) {
    case MarriageMethod::hall: return marriage_hall(B_k, eps);
    case MarriageMethod::rank: return marriage_rank(B_k, eps, rank_tol);
    case MarriageMethod::both: {
      auto hall = marriage_hall(B_k, eps);
      auto rank = marriage_rank(B_k, eps, rank_tol);
      if (hall.ok != rank.ok)
        throw internal_error("support matching and numerical rank disagree on the coverage test");
      return hall;
    }
  }
  throw internal_error("bad marriage method value");
}

MarriageVerdict marriage_exhaustive(const Matrix& B_k, double eps) {
  const int r = static_cast<int>(B_k.rows());
  if (r > 12) throw config_error("exhaustive coverage check is limited to 12 rows");
  std::vector<IndexSet> supports(r);
  for (int i = 0; i < r; ++i) supports[i] = row_support(B_k.row(i), eps);
  for (int size = 1; size <= r; ++size) {
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
      if (std::popcount(mask) != size) continue;
      IndexSet covered;
      for (int i = 0; i < r; ++i)
        if (mask & (1u << i)) covered = set_union(covered, supports[i]);
      if (static_cast<int>(covered.size()) < size) {
        MarriageVerdict verdict;
        verdict.ok = false;
        verdict.witness.present = true;
        for (int i = 0; i < r; ++i)
          if (mask & (1u << i)) verdict.witness.subset.push_back(i);
        verdict.witness.text = "rows cover fewer sources than their count";
        return verdict;
      }
    }
  }
  return {};
}

ConditionReport verify_model(const Pscm& model, VerifyVariant variant, double eps,
                             MarriageMethod method) {
  MixingMatrix mixing = mixing_matrix(model, eps);
  auto w_supports = row_supports(mixing.W, eps);
  auto b_supports = row_supports(model.B, eps);
  auto order = sparsity_order(w_supports);

  ConditionReport report;
  report.variant = variant;

  for (int k : order) {
    IndexSet parents;
    for (int i = 0; i < model.p; ++i)
      if (i != k && is_strict_subset(w_supports[i], w_supports[k])) parents.push_back(i);

    // A declared causal parent outside the possible-parent set breaks the
    // nested-support requirement; nothing downstream is trustworthy then.
    for (int j = 0; j < model.p; ++j)
      if (model.A(k, j) != 0.0 && !set_contains(parents, j)) {
        report.overall = false;
        throw EdgeSupportViolation("causal edge " + var_name(j) + " -> " + var_name(k) +
                                       " violates the nested-support requirement",
                                   k, j, report);
      }

    MixtureList mixtures;
    for (int i : parents) mixtures.emplace_back(i, b_supports[i]);
    auto layers = unique_component_layers(mixtures);
    auto unique_verdict = check_unique_components_condition(b_supports[k], layers, mixtures);

    VariableConditionResult var_result;
    var_result.k = k;
    var_result.unique_ok = unique_verdict.ok;
    if (!unique_verdict.ok) {
      var_result.witness_source = unique_verdict.witness.source;
      var_result.witness_variable = unique_verdict.witness.variable;
      var_result.witness = unique_verdict.witness.text;
    }

    if (variant == VerifyVariant::paper) {
      // Weaker residual-only test: the leftover rows just need at least as
      // many populated source columns as rows.
      const auto& residual = layers.residual;
      IndexSet covered;
      for (int i : residual) covered = set_union(covered, b_supports[i]);
      if (static_cast<int>(covered.size()) < static_cast<int>(residual.size())) {
        var_result.marriage_ok = false;
        var_result.witness_subset = residual;
        if (var_result.witness.empty())
          var_result.witness = "residual possible parents cover too few sources";
      }
    } else {
      IndexSet columns;
      for (int i : parents) columns = set_union(columns, b_supports[i]);
      Matrix B_k(static_cast<int>(parents.size()), static_cast<int>(columns.size()));
      for (int a = 0; a < static_cast<int>(parents.size()); ++a)
        for (int b = 0; b < static_cast<int>(columns.size()); ++b)
          B_k(a, b) = model.B(parents[a], columns[b]);
      auto marriage_verdict = check_marriage_condition(B_k, method, eps);
      if (!marriage_verdict.ok) {
        var_result.marriage_ok = false;
        for (int pos : marriage_verdict.witness.subset)
          var_result.witness_subset.push_back(parents[pos]);
        if (var_result.witness.empty())
          var_result.witness = "possible parents cover fewer sources than their count";
      }
    }

    report.overall = report.overall && var_result.unique_ok && var_result.marriage_ok;
    report.per_variable.push_back(std::move(var_result));
  }
  return report;
}

DistinctSourceVerdict check_distinct_source_condition(const Pscm& model, double eps) {
  MixingMatrix mixing = mixing_matrix(model, eps);
  auto w_supports = row_supports(mixing.W, eps);
  auto b_supports = row_supports(model.B, eps);

  // Precondition: every observed variable owns a source no other variable
  // touches.
  std::vector<int> col_owners(model.m, 0);
  std::vector<int> col_owner(model.m, -1);
  for (int j = 0; j < model.m; ++j)
    for (int i = 0; i < model.p; ++i)
      if (std::abs(model.B(i, j)) > eps) {
        ++col_owners[j];
        col_owner[j] = i;
      }
  std::vector<bool> has_private(model.p, false);
  for (int j = 0; j < model.m; ++j)
    if (col_owners[j] == 1) has_private[col_owner[j]] = true;
  for (int i = 0; i < model.p; ++i)
    if (!has_private[i])
      throw model_error("distinct-source screen requires every observed variable to own a private source; " +
                        var_name(i) + " has none");

  // Directed path counts, used only to annotate failures.
  auto paths_between = [&](int from, int to) {
    std::vector<long long> dp(model.p, 0);
    dp[from] = 1;
    for (int t : model.order) {
      if (dp[t] == 0) continue;
      for (int child = 0; child < model.p; ++child)
        if (model.A(child, t) != 0.0) dp[child] += dp[t];
    }
    return dp[to];
  };

  DistinctSourceVerdict verdict;
  for (int k = 0; k < model.p; ++k) {
    IndexSet parents;
    for (int i = 0; i < model.p; ++i)
      if (i != k && is_strict_subset(w_supports[i], w_supports[k])) parents.push_back(i);
    for (int j : b_supports[k]) {
      IndexSet holders;
      for (int i : parents)
        if (std::abs(model.B(i, j)) > eps) holders.push_back(i);
      if (holders.size() == 1) {
        if (verdict.ok) {
          verdict.ok = false;
          verdict.witness.present = true;
          verdict.witness.source = j;
          verdict.witness.variable = k;
          verdict.witness.text = "source " + src_name(j) + " feeds " + var_name(k) +
                                 " and exactly one possible parent, " + var_name(holders.front());
        }
        if (paths_between(holders.front(), k) >= 2)
          verdict.notes.push_back("lone holder " + var_name(holders.front()) + " reaches " +
                                  var_name(k) + " through multiple causal paths");
      }
    }
  }
  return verdict;
}

std::string condition_report_to_json_string(const ConditionReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& v : report.per_variable) {
    nlohmann::json entry{{"k", v.k}, {"unique_ok", v.unique_ok}, {"marriage_ok", v.marriage_ok}};
    if (!v.unique_ok || !v.marriage_ok) {
      entry["witness"] = v.witness;
      if (v.witness_source >= 0) entry["witness_source"] = v.witness_source;
      if (v.witness_variable >= 0) entry["witness_variable"] = v.witness_variable;
      if (!v.witness_subset.empty()) entry["witness_subset"] = v.witness_subset;
    }
    per.push_back(std::move(entry));
  }
  nlohmann::json j{{"overall", report.overall},
                   {"variant", report.variant == VerifyVariant::paper ? "paper" : "full"},
                   {"per_variable", std::move(per)}};
  return j.dump(2) + "\n";
}

}  // namespace pscm

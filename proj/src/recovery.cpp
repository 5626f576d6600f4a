#include "pscm/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "pscm/io.hpp"
#include "pscm/rng.hpp"
#include "pscm/support.hpp"

namespace pscm {

namespace {

std::string var_name(int i) { return "x" + std::to_string(i + 1); }

std::vector<int> order_by_support(const MixingMatrix& mixing, bool randomize,
                                  std::uint64_t tie_seed) {
  const int p = static_cast<int>(mixing.W.rows());
  std::vector<int> counts(p);
  for (int i = 0; i < p; ++i)
    counts[i] = static_cast<int>(row_support(mixing.W.row(i), mixing.eps).size());
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  if (randomize) {
    Rng rng(tie_seed);
    auto shuffled = rng.permutation(p);
    idx.assign(shuffled.begin(), shuffled.end());
  }
  // Stable sort keeps the (possibly shuffled) relative order inside tie
  // groups.
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return counts[a] < counts[b]; });
  return idx;
}

}  // namespace

std::vector<int> infer_causal_order(const MixingMatrix& mixing) {
  return order_by_support(mixing, false, 0);
}

std::vector<int> infer_causal_order(const MixingMatrix& mixing, bool randomize_ties,
                                    std::uint64_t tie_seed) {
  return order_by_support(mixing, randomize_ties, tie_seed);
}

Matrix prune_adjacency(const Matrix& A_hat, double threshold) {
  Matrix out = A_hat;
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      if (std::abs(out(i, j)) < threshold) out(i, j) = 0.0;
  return out;
}

RecoveryResult recover(const MixingMatrix& mixing, const RecoveryConfig& cfg) {
  const Matrix& W = mixing.W;
  const int p = static_cast<int>(W.rows());
  const int m = static_cast<int>(W.cols());
  if (p < 1 || m < 1) throw data_error("mixing estimate must be non-empty");
  if (!W.allFinite()) throw data_error("mixing estimate has non-finite entries");
  const double eps = cfg.eps;

  std::vector<IndexSet> w_supports(p);
  for (int i = 0; i < p; ++i) {
    w_supports[i] = row_support(W.row(i), eps);
    if (w_supports[i].empty())
      throw data_error("row " + std::to_string(i) + " of the mixing estimate is entirely zero");
  }

  RecoveryResult result;
  result.order_used = order_by_support({W, eps}, cfg.randomize_ties, cfg.tie_seed);
  result.total_effects = Matrix::Identity(p, p);
  result.B_hat = Matrix::Zero(p, m);
  result.support_trace.assign(p, {});

  for (int t = 0; t < p; ++t) {
    const int k = result.order_used[t];

    // Possible parents have strictly smaller supports, so they were all
    // processed in earlier rounds and their mixture rows are final.
    IndexSet parents;
    for (int i : result.order_used)
      if (i != k && is_strict_subset(w_supports[i], w_supports[k])) parents.push_back(i);
    std::sort(parents.begin(), parents.end());

    Eigen::RowVectorXd w = W.row(k);
    auto& trace = result.support_trace[k];
    trace.push_back(static_cast<int>(row_support(w, eps).size()));

    std::vector<int> remaining = parents;
    int layer = 0;
    while (!remaining.empty()) {
      ++layer;
      std::vector<IndexSet> mix(remaining.size());
      for (int idx = 0; idx < static_cast<int>(remaining.size()); ++idx)
        mix[idx] = row_support(result.B_hat.row(remaining[idx]), eps);

      std::vector<std::pair<int, IndexSet>> resolvable;
      std::vector<int> staying;
      for (int idx = 0; idx < static_cast<int>(remaining.size()); ++idx) {
        IndexSet others;
        for (int jdx = 0; jdx < static_cast<int>(remaining.size()); ++jdx)
          if (jdx != idx) others = set_union(others, mix[jdx]);
        IndexSet unique = set_minus(mix[idx], others);
        if (unique.empty())
          staying.push_back(remaining[idx]);
        else
          resolvable.emplace_back(remaining[idx], std::move(unique));
      }
      if (resolvable.empty()) break;

      for (auto& [i, unique] : resolvable) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        int used = 0;
        for (int j : unique) {
          double denom = result.B_hat(i, j);
          if (std::abs(denom) <= eps) continue;
          double est = w(j) / denom;
          if (used == 0) {
            lo = hi = est;
          } else {
            lo = std::min(lo, est);
            hi = std::max(hi, est);
          }
          sum += est;
          ++used;
        }
        if (used == 0) {
          // All divisors collapsed below the support threshold; treat the
          // parent as unresolvable this round.
          staying.push_back(i);
          result.warnings.push_back("unique components of " + var_name(i) + " for " + var_name(k) +
                                    " had sub-threshold coefficients");
          continue;
        }
        double estimate = sum / used;
        ParentEstimate diag;
        diag.k = k;
        diag.parent = i;
        diag.value = estimate;
        diag.method = "unique";
        diag.layer = layer;
        diag.discrepancy = hi - lo;
        result.diagnostics.push_back(diag);

        result.total_effects(k, i) = estimate;
        w -= estimate * result.B_hat.row(i);
        trace.push_back(static_cast<int>(row_support(w, eps).size()));
      }
      std::sort(staying.begin(), staying.end());
      remaining = std::move(staying);
    }

    if (!remaining.empty()) {
      // No unique components left: solve for all residual parents jointly on
      // the source columns their mixtures populate.
      IndexSet columns;
      for (int i : remaining)
        columns = set_union(columns, row_support(result.B_hat.row(i), eps));
      const int nc = static_cast<int>(columns.size());
      const int nr = static_cast<int>(remaining.size());
      Matrix design(nc, nr);
      Vector rhs(nc);
      for (int c = 0; c < nc; ++c) {
        rhs(c) = w(columns[c]);
        for (int idx = 0; idx < nr; ++idx) design(c, idx) = result.B_hat(remaining[idx], columns[c]);
      }

      Eigen::ColPivHouseholderQR<Matrix> qr(design);
      qr.setThreshold(1e-10);
      Vector solution;
      if (qr.rank() < nr) {
        if (!cfg.best_effort)
          throw model_error("possible parents of " + var_name(k) +
                            " cover too few sources to separate their effects");
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
        cod.setThreshold(1e-10);
        solution = cod.solve(rhs);
        result.warnings.push_back("rank-deficient joint solve for " + var_name(k) +
                                  "; minimum-norm effects reported");
      } else {
        solution = qr.solve(rhs);
      }

      double rhs_norm = rhs.norm();
      double residual = (design * solution - rhs).norm();
      double rel_residual = rhs_norm > eps ? residual / rhs_norm : residual;
      if (rel_residual > cfg.ls_residual_tol) {
        if (!cfg.best_effort)
          throw model_error("joint effect solve for " + var_name(k) +
                            " left a relative residual of " + format_double(rel_residual));
        result.warnings.push_back("joint effect solve for " + var_name(k) +
                                  " left a relative residual of " + format_double(rel_residual));
      }

      for (int idx = 0; idx < nr; ++idx) {
        ParentEstimate diag;
        diag.k = k;
        diag.parent = remaining[idx];
        diag.value = solution(idx);
        diag.method = "least-squares";
        diag.layer = layer;
        diag.residual = rel_residual;
        result.diagnostics.push_back(diag);
        result.total_effects(k, remaining[idx]) = solution(idx);
      }
      for (int c = 0; c < nc; ++c) w(columns[c]) = 0.0;
      trace.push_back(static_cast<int>(row_support(w, eps).size()));
    }

    result.B_hat.row(k) = w;
  }

  // Direct effects from cumulative ones: invert the unit-triangular total
  // effect matrix in processing coordinates.
  Matrix perm_total(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      perm_total(a, b) = result.total_effects(result.order_used[a], result.order_used[b]);
  Matrix inv_perm = perm_total.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  result.A_hat = Matrix::Zero(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      if (a != b) result.A_hat(result.order_used[a], result.order_used[b]) = -inv_perm(a, b);
  return result;
}

std::string recovery_result_to_json_string(const RecoveryResult& result, double prune_threshold) {
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : result.diagnostics)
    diags.push_back(nlohmann::json{{"k", d.k},
                                   {"parent", d.parent},
                                   {"value", d.value},
                                   {"method", d.method},
                                   {"layer", d.layer},
                                   {"discrepancy", d.discrepancy},
                                   {"residual", d.residual}});
  nlohmann::json j{{"order_used", result.order_used},
                   {"total_effects", matrix_to_json(result.total_effects)},
                   {"A_hat", matrix_to_json(result.A_hat)},
                   {"B_hat", matrix_to_json(result.B_hat)},
                   {"diagnostics", std::move(diags)},
                   {"warnings", result.warnings},
                   {"support_trace", result.support_trace}};
  if (std::isfinite(prune_threshold)) {
    j["prune_threshold"] = prune_threshold;
    j["A_pruned"] = matrix_to_json(prune_adjacency(result.A_hat, prune_threshold));
  }
  return j.dump(2) + "\n";
}

}  // namespace pscm

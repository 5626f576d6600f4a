#include "pscm/evaluation.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "pscm/io.hpp"
#include "pscm/matching.hpp"
#include "pscm/separation.hpp"
#include "pscm/support.hpp"

namespace pscm {

MetricsReport compare_adjacency(const Matrix& A_true, const Matrix& A_hat, double threshold) {
  if (A_true.rows() != A_hat.rows() || A_true.cols() != A_hat.cols())
    throw data_error("adjacency matrices differ in shape");
  if (A_true.rows() != A_true.cols()) throw data_error("adjacency matrices must be square");

  MetricsReport report;
  int common = 0;
  for (int i = 0; i < A_true.rows(); ++i)
    for (int j = 0; j < A_true.cols(); ++j) {
      if (i == j) continue;
      bool t = std::abs(A_true(i, j)) >= threshold;
      bool h = std::abs(A_hat(i, j)) >= threshold;
      report.true_edges += t;
      report.recovered_edges += h;
      common += t && h;
    }
  report.shd = (report.true_edges - common) + (report.recovered_edges - common);
  report.precision = report.recovered_edges > 0
                         ? static_cast<double>(common) / report.recovered_edges
                         : 1.0;
  report.recall = report.true_edges > 0 ? static_cast<double>(common) / report.true_edges : 1.0;
  if (report.true_edges > 0) {
    report.shd_per_edge = report.shd / report.true_edges;
  } else {
    report.shd_per_edge = 0.0;
    report.shd_per_edge_defined = false;
  }
  report.frobenius = (A_true - A_hat).norm();
  return report;
}

BMatchReport match_B(const Matrix& B_true, const Matrix& B_hat) {
  if (B_true.rows() != B_hat.rows() || B_true.cols() != B_hat.cols())
    throw data_error("exogenous mixture matrices differ in shape");
  const int m = static_cast<int>(B_true.cols());
  Matrix nt = normalize_columns(B_true);
  Matrix nh = normalize_columns(B_hat);
  Matrix cost(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) cost(a, b) = (nh.col(a) - nt.col(b)).squaredNorm();
  BMatchReport report;
  report.permutation = hungarian(cost);
  report.aligned = Matrix::Zero(nh.rows(), m);
  for (int a = 0; a < m; ++a) report.aligned.col(report.permutation[a]) = nh.col(a);
  report.frobenius = (report.aligned - nt).norm();
  return report;
}

bool ica_success(const Matrix& W_true, const Matrix& W_hat, double threshold) {
  if (W_true.rows() != W_hat.rows() || W_true.cols() != W_hat.cols()) return false;
  const int m = static_cast<int>(W_true.cols());
  Matrix nt = normalize_columns(W_true);
  Matrix nh = normalize_columns(W_hat);
  std::vector<IndexSet> true_supports(m), hat_supports(m);
  for (int j = 0; j < m; ++j) {
    true_supports[j] = row_support(nt.col(j).transpose(), threshold);
    hat_supports[j] = row_support(nh.col(j).transpose(), threshold);
  }
  std::vector<IndexSet> adj(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (hat_supports[a] == true_supports[b]) adj[a].push_back(b);
  return hopcroft_karp(m, m, adj).size == m;
}

std::string metrics_to_json_string(const MetricsReport& metrics) {
  nlohmann::json j{{"true_edges", metrics.true_edges},
                   {"recovered_edges", metrics.recovered_edges},
                   {"shd", metrics.shd},
                   {"shd_per_edge",
                    metrics.shd_per_edge_defined ? nlohmann::json(metrics.shd_per_edge)
                                                 : nlohmann::json(nullptr)},
                   {"precision", metrics.precision},
                   {"recall", metrics.recall},
                   {"frobenius", metrics.frobenius}};
  return j.dump(2) + "\n";
}

std::string metrics_to_csv_line(const MetricsReport& metrics) {
  std::string out;
  out += std::to_string(metrics.true_edges) + ",";
  out += std::to_string(metrics.recovered_edges) + ",";
  out += format_double(metrics.shd) + ",";
  out += metrics.shd_per_edge_defined ? format_double(metrics.shd_per_edge) : "nan";
  out += ",";
  out += format_double(metrics.precision) + ",";
  out += format_double(metrics.recall) + ",";
  out += format_double(metrics.frobenius);
  return out;
}

}  // namespace pscm

#include "pscm/dot.hpp"

#include <sstream>

#include "pscm/io.hpp"
#include "pscm/support.hpp"

namespace pscm {

namespace {

std::string obs_label(int i, const std::vector<std::string>& names) {
  if (i < static_cast<int>(names.size()) && !names[i].empty()) return names[i];
  return "x" + std::to_string(i + 1);
}

void emit_header(std::ostream& os) {
  os << "digraph pscm {\n  rankdir=LR;\n";
}

void emit_observed(std::ostream& os, int p, const std::vector<std::string>& names) {
  for (int i = 0; i < p; ++i)
    os << "  v" << i << " [shape=circle, label=\"" << obs_label(i, names) << "\"];\n";
}

void emit_causal_edges(std::ostream& os, const Matrix& A, double eps) {
  for (int child = 0; child < A.rows(); ++child)
    for (int parent = 0; parent < A.cols(); ++parent)
      if (std::abs(A(child, parent)) > eps)
        os << "  v" << parent << " -> v" << child << " [label=\""
           << format_double(A(child, parent)) << "\"];\n";
}

void emit_sources(std::ostream& os, const Matrix& B, double eps) {
  for (int j = 0; j < B.cols(); ++j)
    os << "  s" << j << " [shape=square, label=\"s" << j + 1 << "\"];\n";
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (std::abs(B(i, j)) > eps)
        os << "  s" << j << " -> v" << i << " [style=dashed, label=\""
           << format_double(B(i, j)) << "\"];\n";
}

}  // namespace

std::string model_to_dot(const Pscm& model, double eps, const std::vector<std::string>& names) {
  std::ostringstream os;
  emit_header(os);
  emit_observed(os, model.p, names);
  emit_sources(os, model.B, eps);
  emit_causal_edges(os, model.A, eps);
  os << "}\n";
  return os.str();
}

std::string recovery_to_dot(const RecoveryResult& result, double prune_threshold,
                            const std::vector<std::string>& names, bool include_sources,
                            double eps) {
  std::ostringstream os;
  emit_header(os);
  emit_observed(os, static_cast<int>(result.A_hat.rows()), names);
  if (include_sources) emit_sources(os, result.B_hat, eps);
  Matrix pruned = result.A_hat;
  for (int i = 0; i < pruned.rows(); ++i)
    for (int j = 0; j < pruned.cols(); ++j)
      if (std::abs(pruned(i, j)) < prune_threshold) pruned(i, j) = 0.0;
  emit_causal_edges(os, pruned, 0.0);
  os << "}\n";
  return os.str();
}

}  // namespace pscm

#pragma once

#include <initializer_list>
#include <vector>

#include "pscm/identifiability.hpp"
#include "pscm/model.hpp"
#include "pscm/types.hpp"

namespace pscm::testing {

inline Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  int nr = static_cast<int>(rows.size());
  int nc = nr ? static_cast<int>(rows.begin()->size()) : 0;
  Matrix m(nr, nc);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline std::vector<int> natural_order(int p) {
  std::vector<int> order(p);
  for (int i = 0; i < p; ++i) order[i] = i;
  return order;
}

inline Pscm make_model(const Matrix& A, const Matrix& B) {
  Pscm model;
  model.p = static_cast<int>(A.rows());
  model.m = static_cast<int>(B.cols());
  model.A = A;
  model.B = B;
  model.order = natural_order(model.p);
  return model;
}

// Two exogenous-only roots feeding one child; every coefficient concrete so
// the mixing matrix and the recovery trace are exact.
//   x1 = s1 + 2 s2; x2 = 3 s1 + 4 s3; x3 = 0.5 x1 + 0.7 x2 + 5 s1
// giving W = [[1,2,0],[3,0,4],[7.6,1.0,2.8]].
inline Pscm two_roots_one_child_model() {
  Matrix A = make_matrix({{0, 0, 0}, {0, 0, 0}, {0.5, 0.7, 0}});
  Matrix B = make_matrix({{1, 2, 0}, {3, 0, 4}, {5, 0, 0}});
  return make_model(A, B);
}

// A child fully determined by its two parents: legal here, even though the
// child has no exogenous term of its own.
inline Pscm deterministic_child_model() {
  Matrix A = make_matrix({{0, 0, 0}, {0, 0, 0}, {0.8, 1.3, 0}});
  Matrix B = make_matrix({{1.0, 0, 0.7}, {0, 1.1, 0.9}, {0, 0, 0}});
  return make_model(A, B);
}

// The child is exogenously connected to a source that is a unique component
// of one of its possible parents, so its causal strengths cannot be told
// apart from the exogenous share.
inline Pscm unique_violation_model() {
  Matrix A = make_matrix({{0, 0, 0}, {0, 0, 0}, {0.5, 0.7, 0}});
  Matrix B = make_matrix({{1, 2, 0}, {3, 0, 4}, {0, 5, 0}});
  return make_model(A, B);
}

// Five possible parents that jointly cover only four sources; no subset of
// them can be separated, so the coverage (marriage) condition fails at the
// last variable.
inline Pscm coverage_violation_model() {
  Matrix A(6, 6);
  A.setZero();
  A(5, 1) = 0.9;
  A(5, 3) = 0.8;
  A(5, 4) = -1.1;
  Matrix B = make_matrix({{1.0, 0.6, 0, 0, 0},
                          {1.2, 0, 0.7, 0, 0},
                          {0, 1.3, 0.8, 0, 0},
                          {0, 0.9, 0, 1.4, 0},
                          {0, 0, 1.1, 0.5, 0},
                          {0, 0, 0, 0, 1.0}});
  return make_model(A, B);
}

// Every variable owns a private source, but the shared source reaches x3
// both exogenously and through exactly one holder among its possible
// parents. Source order: (s1, s2, s3, shared).
inline Pscm lone_holder_model() {
  Matrix A(3, 3);
  A.setZero();
  A(2, 0) = 0.9;
  Matrix B = make_matrix({{1, 0, 0, 0.6}, {0, 1, 0, 0.7}, {0, 0, 1, 0.8}});
  return make_model(A, B);
}

// Mixing whose third row strictly contains the first row's support but not
// the second's, so only x1 qualifies as a possible parent of x3.
inline Matrix possible_parent_demo_mixing() {
  return make_matrix({{1, 2, 0, 0}, {3, 0, 4, 0}, {2, 4, 0, 7}});
}

// Six source mixtures over eight sources whose peeling takes two rounds and
// strands the last two mixtures.
inline MixtureList layered_mixtures() {
  return {{0, {0, 2, 3, 6}}, {1, {1, 2, 4}}, {2, {3, 5}},
          {3, {4, 5, 7}},    {4, {6, 7}},    {5, {6, 7}}};
}

// Bootstrapped source-separation estimate for the daily returns of five
// world stock indices, rows DJI, N225, N100, HSI, SSEC.
inline Matrix stock_index_mixing() {
  return make_matrix({{0.9096, 0.2761, 0, 0, 0},
                      {0, 0.7993, 0, 0.7414, 0.2048},
                      {0.4412, 0.7738, 0.1805, -0.2962, 0},
                      {0.1537, 0.4141, 0.2902, 0.1992, 0.9398},
                      {0.1480, 0.2048, 1.0000, 0.4624, 0.3513}});
}

// Residual parents whose covered-column count matches their number while a
// strict subset of them is still deficient: the cheap residual-only check
// accepts this model, the complete subset test rejects it.
inline Pscm residual_gap_model() {
  Matrix A(5, 5);
  A.setZero();
  A(4, 0) = 0.6;
  A(4, 1) = 0.7;
  A(4, 2) = 0.8;
  A(4, 3) = 0.9;
  Matrix B = make_matrix({{1.0, 0, 0, 0, 0},
                          {0.8, 0, 0, 0, 0},
                          {0, 1.0, 1.2, 0.9, 0},
                          {0, 1.1, 0.7, 1.3, 0},
                          {0, 0, 0, 0, 1.0}});
  return make_model(A, B);
}

}  // namespace pscm::testing

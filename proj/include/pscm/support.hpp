#pragma once

#include <algorithm>

#include "pscm/types.hpp"

namespace pscm {

inline IndexSet row_support(const Eigen::Ref<const Eigen::RowVectorXd>& row, double eps) {
  IndexSet out;
  for (int j = 0; j < row.size(); ++j)
    if (std::abs(row(j)) > eps) out.push_back(j);
  return out;
}

inline bool set_contains(const IndexSet& s, int v) {
  return std::binary_search(s.begin(), s.end(), v);
}

inline bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool is_strict_subset(const IndexSet& a, const IndexSet& b) {
  return a.size() < b.size() && is_subset(a, b);
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet set_intersect(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace pscm

#include "pscm/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace pscm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix_csv_file(const std::string& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open '" + path + "' for writing");
  write_matrix_csv(os, m);
  if (!os) throw data_error("write failed for '" + path + "'");
}

Matrix read_matrix_csv(std::istream& is, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    int col = 1;
    while (true) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p)
        throw data_error(origin + ":" + std::to_string(line_no) + ":" + std::to_string(col) +
                         ": expected a number");
      row.push_back(v);
      p = end;
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == ',') {
        ++p;
        ++col;
        continue;
      }
      if (*p == '\0') break;
      throw data_error(origin + ":" + std::to_string(line_no) + ":" + std::to_string(col) +
                       ": unexpected character '" + std::string(1, *p) + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw data_error(origin + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(origin + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  if (!m.allFinite()) throw data_error(origin + ": non-finite entries");
  return m;
}

Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open '" + path + "'");
  return read_matrix_csv(is, path);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw data_error("field '" + field + "' must be a non-empty array of rows");
  const auto n_rows = j.size();
  const auto n_cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!j[i].is_array() || j[i].size() != n_cols)
      throw data_error("field '" + field + "' row " + std::to_string(i) + " has wrong length");
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!j[i][c].is_number())
        throw data_error("field '" + field + "' has a non-numeric entry at row " +
                         std::to_string(i) + ", column " + std::to_string(c));
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  if (!m.allFinite()) throw data_error("field '" + field + "' has non-finite entries");
  return m;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw data_error("write failed for '" + path + "'");
}

}  // namespace pscm

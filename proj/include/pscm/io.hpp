#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "pscm/types.hpp"

namespace pscm {

// All numeric CSV output uses 17 significant digits so doubles round-trip
// exactly through text.
std::string format_double(double v);

void write_matrix_csv(std::ostream& os, const Matrix& m);
void write_matrix_csv_file(const std::string& path, const Matrix& m);

// Rectangular, comma-separated, no header. Parse failures throw a data error
// naming the line and column.
Matrix read_matrix_csv(std::istream& is, const std::string& origin = "<stream>");
Matrix read_matrix_csv_file(const std::string& path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pscm

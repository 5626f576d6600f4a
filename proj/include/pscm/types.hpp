#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace pscm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, duplicate-free list of indices. Used for variable/source supports.
using IndexSet = std::vector<int>;

enum class ErrorKind { config, data, model, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorKind::config, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::data, msg); }
inline Error model_error(const std::string& msg) { return Error(ErrorKind::model, msg); }
inline Error internal_error(const std::string& msg) { return Error(ErrorKind::internal, msg); }

}  // namespace pscm

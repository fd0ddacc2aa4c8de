#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ddmpc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// All user-facing failures derive from this; the CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline void require_dims(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

inline Mat symmetrized(const Mat& M) { return 0.5 * (M + M.transpose()); }

}  // namespace ddmpc

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace varoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when the control metric g(q) is not positive definite at an
/// evaluation point.
struct MetricSingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by model evaluations at singular configurations (e.g. r = 0 for the
/// Kepler drift).
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

}  // namespace varoc

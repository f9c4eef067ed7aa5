#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace duality {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Half-open index range [begin, end).
struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
  bool empty() const { return end <= begin; }
};

/// Outcome of an identity check: the largest absolute entry of
/// (lhs - rhs) over the block the identity is asserted on.
struct ResidualReport {
  std::string identity;
  double max_abs_residual = 0.0;
  IndexRange rows;
  IndexRange cols;

  bool within(double tol) const { return max_abs_residual <= tol; }
};

}  // namespace duality

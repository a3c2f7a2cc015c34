#pragma once

#include <Eigen/Dense>

namespace mms::testing {

struct LpResult {
  bool bounded = true;
  double value = 0.0;
  Eigen::VectorXd x;
};

// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is feasible).
// Dense tableau simplex with Bland's rule, so it terminates on degenerate vertices.
LpResult maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace mms::testing

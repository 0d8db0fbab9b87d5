#pragma once

#include <Eigen/Dense>

namespace bsip {

// Linear least squares: x minimizing ||A x - b||. Uses a column-pivoted
// Householder QR; throws SingularSystemError naming the dependent columns
// when rank(A) < cols(A) at relative threshold 1e-10.
Eigen::VectorXd lls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// The textbook normal-equation form x = (A'A)^-1 A'b. Kept for cross-checks;
// squares the condition number.
Eigen::VectorXd lls_solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace bsip

#include "bsip/lls.hpp"

#include <string>

#include "bsip/error.hpp"

namespace bsip {

Eigen::VectorXd lls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.rows()) throw InputError("least squares: row count mismatch");
  if (a.cols() == 0) throw InputError("least squares: no unknowns");
  if (a.rows() < a.cols()) throw InputError("least squares: fewer equations than unknowns");
  if (!a.allFinite() || !b.allFinite()) throw InputError("least squares: non-finite entries");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < a.cols(); ++k) {
      cols += (cols.empty() ? "" : ", ") + std::to_string(perm(k) + 1);
    }
    throw SingularSystemError("least squares: rank " + std::to_string(qr.rank()) + " < " +
                              std::to_string(a.cols()) + ", dependent column(s) " + cols);
  }
  return qr.solve(b);
}

Eigen::VectorXd lls_solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.rows()) throw InputError("least squares: row count mismatch");
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(ata);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularSystemError("normal equations are not positive definite");
  }
  return ldlt.solve(a.transpose() * b);
}

}  // namespace bsip

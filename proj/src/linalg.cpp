#include "mixl/linalg.hpp"

#include <cmath>

#include "mixl/errors.hpp"

namespace mixl {

bool is_symmetric(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    }
  }
  return true;
}

Eigen::MatrixXd cholesky_psd(const Eigen::MatrixXd& a) {
  const int p = static_cast<int>(a.rows());
  if (a.cols() != p) throw NumericalError("cholesky needs a square matrix");
  if (p == 0) return Eigen::MatrixXd(0, 0);
  double scale = 0.0;
  for (int i = 0; i < p; ++i) scale = std::max(scale, std::abs(a(i, i)));
  if (scale == 0.0) scale = 1.0;
  const double tol = 1e-12 * scale;

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d < -tol) throw NumericalError("matrix is not positive semidefinite");
    if (d <= tol) continue;  // null direction, leave the column zero
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }

  // Zeroed pivots can silently absorb indefinite input; verify the factor
  // reproduces the matrix.
  const double err = (L * L.transpose() - a).cwiseAbs().maxCoeff();
  if (err > 1e-8 * scale) throw NumericalError("matrix is not positive semidefinite");
  return L;
}

Eigen::MatrixXd cholesky_psd_jittered(const Eigen::MatrixXd& a) {
  try {
    return cholesky_psd(a);
  } catch (const NumericalError&) {
    Eigen::MatrixXd b = a;
    b.diagonal().array() += 1e-10;
    return cholesky_psd(b);
  }
}

double quad_form_chol(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& d) {
  const Eigen::VectorXd y =
      chol_lower.triangularView<Eigen::Lower>().solve(d);
  return y.squaredNorm();
}

Eigen::MatrixXd inverse_from_chol(const Eigen::MatrixXd& chol_lower) {
  const int p = static_cast<int>(chol_lower.rows());
  const Eigen::MatrixXd linv = chol_lower.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(p, p));
  return linv.transpose() * linv;
}

}  // namespace mixl

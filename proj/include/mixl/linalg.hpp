#pragma once

#include <Eigen/Dense>

namespace mixl {

// Lower-triangular Cholesky factor tolerant of semidefinite input: a pivot
// within tolerance of zero zeroes out its column, so the all-zero matrix
// factors to zero. Throws NumericalError for clearly indefinite input
// (negative pivot or reconstruction failure).
Eigen::MatrixXd cholesky_psd(const Eigen::MatrixXd& a);

// cholesky_psd with one retry after adding 1e-10 to the diagonal.
Eigen::MatrixXd cholesky_psd_jittered(const Eigen::MatrixXd& a);

bool is_symmetric(const Eigen::MatrixXd& a, double tol);

// ||L^{-1} d||^2 for lower-triangular L with strictly positive diagonal.
double quad_form_chol(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& d);

// Inverse from a strictly positive-diagonal lower Cholesky factor.
Eigen::MatrixXd inverse_from_chol(const Eigen::MatrixXd& chol_lower);

}  // namespace mixl

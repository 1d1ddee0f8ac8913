#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "mixl/spec.hpp"

namespace mixl {

// Population-level model parameters: fixed coefficients, and the mean and
// covariance of the latent (untransformed) random coefficients.
struct ModelParams {
  Eigen::VectorXd fixed_coefs;  // length q
  Eigen::VectorXd latent_mean;  // length p
  Eigen::MatrixXd latent_cov;   // p x p, symmetric PSD

  // Throws SpecError on dimension mismatch, NumericalError when latent_cov is
  // asymmetric beyond 1e-10 or not PSD. The degenerate all-zero covariance is
  // legal (point mass at the mean).
  void validate(const UtilitySpec& spec) const;
};

// A transferable estimated model: parameters plus provenance, tied to a spec
// by content hash.
struct PriorModel {
  ModelParams params;
  std::uint64_t spec_hash = 0;
  std::string provenance;
  std::uint64_t seed = 0;
};

}  // namespace mixl

#include "mixl/params.hpp"

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"

namespace mixl {

void ModelParams::validate(const UtilitySpec& spec) const {
  if (fixed_coefs.size() != spec.num_fixed()) {
    throw SpecError("fixed coefficient vector has the wrong length");
  }
  if (latent_mean.size() != spec.num_random()) {
    throw SpecError("latent mean vector has the wrong length");
  }
  if (latent_cov.rows() != spec.num_random() || latent_cov.cols() != spec.num_random()) {
    throw SpecError("latent covariance has the wrong shape");
  }
  if (!is_symmetric(latent_cov, 1e-10)) {
    throw NumericalError("latent covariance is not symmetric");
  }
  cholesky_psd_jittered(latent_cov);  // throws when not PSD
}

}  // namespace mixl

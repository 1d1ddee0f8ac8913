#include "mixl/samplers.hpp"

#include <cmath>

#include "mixl/errors.hpp"
#include "mixl/logit.hpp"

namespace mixl {

MhTuning MhTuning::make(int num_random, int num_fixed) {
  MhTuning t;
  (void)num_random;
  t.fixed_scale = Eigen::VectorXd::Constant(num_fixed, 0.1);
  t.scale_mean = Eigen::VectorXd::Zero(num_fixed);
  t.scale_m2 = Eigen::VectorXd::Zero(num_fixed);
  return t;
}

void MhTuning::observe_fixed(const Eigen::VectorXd& fixed_coefs) {
  ++scale_count;
  const Eigen::VectorXd delta = fixed_coefs - scale_mean;
  scale_mean += delta / static_cast<double>(scale_count);
  scale_m2 += delta.cwiseProduct(fixed_coefs - scale_mean);
  // Switch from the fallback scale once the estimate has settled.
  if (scale_count >= 50) {
    const Eigen::VectorXd sd =
        (scale_m2 / static_cast<double>(scale_count - 1)).cwiseSqrt();
    fixed_scale = sd.cwiseMax(1e-3);
  }
}

void MhTuning::record_fixed(bool accepted) {
  ++fixed_proposals;
  if (accepted) ++fixed_accepts;
  fixed_window[fixed_window_pos] = accepted ? 1 : 0;
  fixed_window_pos = (fixed_window_pos + 1) % kFixedWindow;
  if (fixed_window_size < kFixedWindow) ++fixed_window_size;
}

double MhTuning::fixed_rate() const {
  if (fixed_window_size == 0) return 0.0;
  int accepted = 0;
  for (int i = 0; i < fixed_window_size; ++i) accepted += fixed_window[i];
  return static_cast<double>(accepted) / fixed_window_size;
}

double adapt_step_size(double step, double acceptance_rate) {
  if (acceptance_rate < 0.29) {
    step *= 0.98;
  } else if (acceptance_rate > 0.31) {
    step *= 1.02;
  }
  return std::clamp(step, 1e-6, 1e2);
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw SpecError("covariance shape does not match the mean");
  }
  const Eigen::MatrixXd chol = cholesky_psd_jittered(cov);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + chol * z;
}

Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale,
                                       RngStream& rng) {
  const int p = static_cast<int>(scale.rows());
  if (scale.cols() != p) throw SpecError("inverse Wishart scale must be square");
  if (!(dof > p - 1)) throw NumericalError("inverse Wishart dof too small");

  // Draw W ~ Wishart(dof, scale^{-1}) via Bartlett, return W^{-1}.
  const Eigen::MatrixXd scale_chol = cholesky_psd(scale);
  for (int i = 0; i < p; ++i) {
    if (scale_chol(i, i) <= 0.0) throw NumericalError("inverse Wishart scale is singular");
  }
  const Eigen::MatrixXd inv_chol_factor =
      scale_chol.triangularView<Eigen::Lower>()
          .solve(Eigen::MatrixXd::Identity(p, p))
          .transpose();  // chol(scale^{-1}) up to orientation: scale^{-1} = F F^T

  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Eigen::MatrixXd w_chol = inv_chol_factor * bartlett;
  // W = w_chol w_chol^T, so W^{-1} = w_chol^{-T} w_chol^{-1}.
  const Eigen::MatrixXd inv = w_chol.inverse();
  Eigen::MatrixXd out = inv.transpose() * inv;
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

MhResult mh_update_individual(const Eigen::VectorXd& latent, const Individual& individual,
                              const UtilitySpec& spec, const Eigen::VectorXd& fixed_coefs,
                              const Eigen::VectorXd& latent_mean,
                              const Eigen::MatrixXd& latent_cov, double step,
                              RngStream& rng) {
  const Eigen::MatrixXd chol = cholesky_psd_jittered(latent_cov);
  auto log_target = [&](const Eigen::VectorXd& b) {
    const double prior = -0.5 * quad_form_chol(chol, b - latent_mean);
    return panel_log_likelihood(spec, individual, fixed_coefs, b) + prior;
  };
  return mh_step(latent, log_target(latent), log_target, chol, step, rng);
}

MhResult mh_update_fixed(const Eigen::VectorXd& fixed_coefs, const Dataset& dataset,
                         const Eigen::MatrixXd& latents, const MhTuning& tuning,
                         RngStream& rng) {
  if (fixed_coefs.size() == 0) {
    return {fixed_coefs, 0.0, true};
  }
  auto log_target = [&](const Eigen::VectorXd& a) {
    double ll = 0.0;
    for (int n = 0; n < dataset.num_individuals(); ++n) {
      ll += panel_log_likelihood(dataset.spec, dataset.individuals[n], a,
                                 latents.row(n).transpose());
    }
    return ll;
  };
  const Eigen::MatrixXd chol = tuning.fixed_scale.asDiagonal();
  return mh_step(fixed_coefs, log_target(fixed_coefs), log_target, chol,
                 tuning.fixed_step, rng);
}

}  // namespace mixl

#pragma once

#include <array>

#include <Eigen/Dense>

#include "mixl/data.hpp"
#include "mixl/linalg.hpp"
#include "mixl/rng.hpp"

namespace mixl {

// Random-walk Metropolis-Hastings tuning state. Step sizes adapt toward the
// 0.29..0.31 acceptance band every epoch; the latent rate pools the epoch's
// individual proposals, the fixed rate is a sliding window of recent epochs
// (one proposal per epoch is too noisy on its own).
struct MhTuning {
  static constexpr int kFixedWindow = 20;

  double latent_step = 0.1;
  double fixed_step = 0.1;
  Eigen::VectorXd fixed_scale;  // per-component proposal scale, floor 1e-3

  long long fixed_proposals = 0;
  long long fixed_accepts = 0;
  std::array<unsigned char, kFixedWindow> fixed_window{};
  int fixed_window_size = 0;
  int fixed_window_pos = 0;

  // Running estimate of the fixed-coefficient posterior scale feeding
  // fixed_scale (Welford).
  long long scale_count = 0;
  Eigen::VectorXd scale_mean;
  Eigen::VectorXd scale_m2;

  static MhTuning make(int num_random, int num_fixed);
  void observe_fixed(const Eigen::VectorXd& fixed_coefs);
  void record_fixed(bool accepted);
  double fixed_rate() const;  // acceptance rate over the sliding window
};

// Multiplicative step-size adaptation: shrink 2% below the band, grow 2%
// above it, clamp to [1e-6, 1e2].
double adapt_step_size(double step, double acceptance_rate);

// Draw from N(mean, cov). cov may be PSD; indefinite input gets one jitter
// retry then throws NumericalError.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng);

// Draw from the inverse Wishart with the density parametrization whose mean
// is scale / (dof - p - 1). Requires dof > p - 1 and SPD scale.
Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale,
                                       RngStream& rng);

struct MhResult {
  Eigen::VectorXd value;
  double log_target = 0.0;
  bool accepted = false;
};

// One random-walk MH step: proposal = current + step * chol * z. The uniform
// is always consumed, so draw usage per call is fixed. log_target must return
// the (unnormalized) log density.
template <class LogTarget>
MhResult mh_step(const Eigen::VectorXd& current, double current_log_target,
                 LogTarget&& log_target, const Eigen::MatrixXd& proposal_chol,
                 double step, RngStream& rng) {
  const int p = static_cast<int>(current.size());
  Eigen::VectorXd z(p);
  for (int i = 0; i < p; ++i) z[i] = rng.normal();
  Eigen::VectorXd proposal = current + step * (proposal_chol * z);
  const double proposed = log_target(proposal);
  const double log_u = std::log(rng.uniform_pos());
  const double delta = proposed - current_log_target;
  if (delta >= 0.0 || log_u < delta) {
    return {std::move(proposal), proposed, true};
  }
  return {current, current_log_target, false};
}

// Layer-1 update for one individual: MH on the latent vector with target
// panel likelihood times the population normal density. Reference path; the
// engine uses the compiled-design equivalent.
MhResult mh_update_individual(const Eigen::VectorXd& latent, const Individual& individual,
                              const UtilitySpec& spec, const Eigen::VectorXd& fixed_coefs,
                              const Eigen::VectorXd& latent_mean,
                              const Eigen::MatrixXd& latent_cov, double step,
                              RngStream& rng);

// Layer-4 update: MH on the fixed coefficients with flat prior, target the
// product of all panel likelihoods at the individuals' current latents.
// latents is num_individuals x p. Zero fixed coefficients is a no-op accept.
MhResult mh_update_fixed(const Eigen::VectorXd& fixed_coefs, const Dataset& dataset,
                         const Eigen::MatrixXd& latents, const MhTuning& tuning,
                         RngStream& rng);

}  // namespace mixl

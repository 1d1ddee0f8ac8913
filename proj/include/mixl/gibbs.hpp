#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "mixl/design.hpp"
#include "mixl/params.hpp"
#include "mixl/samplers.hpp"
#include "mixl/threadpool.hpp"

namespace mixl {

struct GibbsConfig {
  int max_epochs = 10000;
  int thin_interval = 10;      // retain a draw and checkpoint every T1 epochs
  int plot_interval = 20;      // trace decimation hint for plots
  int prior_dof = 0;           // covariance prior strength K; 0 means p
  int eval_draws = 100;        // simulation draws for CEL evaluation
  int summary_window = 50;     // retained draws pooled into the summary
  int workers = 1;             // layer-1 parallelism; 0 means all cores
  std::uint64_t seed = 0;

  void validate() const;  // throws SpecError
};

// Full sampler state, enough to reproduce an epoch given the config and data.
struct ChainState {
  ModelParams params;
  Eigen::MatrixXd latents;  // num_individuals x p, untransformed
  MhTuning tuning;
  int epoch = 0;
};

struct Draw {
  int epoch = 0;
  Eigen::VectorXd fixed_coefs;
  Eigen::VectorXd latent_mean;
  Eigen::MatrixXd latent_cov;
  Eigen::MatrixXd latents;
};

using RetainedDraws = std::vector<Draw>;

struct CoefStat {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
};

// Posterior summary over a draw window: latent means and spreads per random
// coefficient, pooled simulated (transformed) coefficients, fixed
// coefficients, and the window means used for prior extraction.
struct PosteriorSummary {
  std::vector<CoefStat> latent_mean_stats;   // per random coefficient
  std::vector<CoefStat> latent_sd_stats;     // sqrt of covariance diagonal
  std::vector<CoefStat> simulated_stats;     // transformed, pooled over draws x individuals
  std::vector<CoefStat> fixed_stats;         // per fixed coefficient
  Eigen::VectorXd fixed_mean;
  Eigen::VectorXd latent_mean_mean;
  Eigen::MatrixXd latent_cov_mean;
  std::vector<CoefficientKind> random_kinds;
  int draw_count = 0;
  int epoch = 0;  // last epoch contributing to the window
};

// Layer 2: population mean draw, N(average latent, cov / N).
Eigen::VectorXd sample_latent_mean(const Eigen::MatrixXd& latents,
                                   const Eigen::MatrixXd& latent_cov, RngStream& rng);

// Layer 3: population covariance draw, inverse Wishart with dof K + N and
// scale K*I + N*S where S is the mean outer product of centered latents.
Eigen::MatrixXd sample_latent_cov(const Eigen::MatrixXd& latents,
                                  const Eigen::VectorXd& latent_mean, int prior_dof,
                                  RngStream& rng);

// One full sweep over the four layers, reusing per-individual RNG streams and
// cached likelihoods across epochs. Construct once per chain.
class GibbsSampler {
 public:
  GibbsSampler(const DesignMatrix& design, const GibbsConfig& config);

  void reset(ChainState state);  // also re-derives streams from config seed
  void run_epoch();
  const ChainState& state() const { return state_; }

 private:
  void refresh_caches();
  void update_latents();
  void update_fixed();
  double total_log_likelihood(const Eigen::VectorXd& fixed_coefs,
                              std::vector<double>* per_individual);

  const DesignMatrix& design_;
  GibbsConfig config_;
  ChainState state_;
  std::vector<RngStream> latent_streams_;
  RngStream population_stream_;
  std::unique_ptr<ThreadPool> pool_;
  int workers_ = 1;

  Eigen::MatrixXd transformed_;       // num_individuals x p
  std::vector<double> cached_loglik_;  // per individual, at current state
  Eigen::MatrixXd cov_chol_;
  std::vector<double> scratch_;       // utilities, one slab per worker
  std::vector<std::uint8_t> accept_flags_;
};

// Convenience single-sweep entry used by tests; equivalent to one sampler
// epoch starting from `state`.
ChainState gibbs_epoch(const ChainState& state, const DesignMatrix& design,
                       const GibbsConfig& config);

// Monitor runs after every retained draw; return false to stop the chain.
using ChainMonitor =
    std::function<bool(int epoch, const ChainState& state, const RetainedDraws& draws)>;

// Run up to max_epochs sweeps, retaining a draw every thin_interval epochs
// into `draws` (appended in place so callers keep partial output if a monitor
// throws). Returns the final state.
ChainState run_chain(const DesignMatrix& design, const GibbsConfig& config,
                     ChainState init, RetainedDraws& draws,
                     const ChainMonitor& monitor = {});

// Pooled statistics over the trailing `window` draws (all draws if fewer).
// Throws SpecError on an empty draw list.
PosteriorSummary summarize_posterior(const UtilitySpec& spec, const RetainedDraws& draws,
                                     int window);

// Degenerate summary when no draw was ever retained: means from the state,
// zero spreads.
PosteriorSummary summary_from_state(const UtilitySpec& spec, const ChainState& state);

}  // namespace mixl

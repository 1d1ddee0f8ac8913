#include "mixl/gibbs.hpp"

#include <cmath>
#include <thread>

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"
#include "mixl/logit.hpp"

namespace mixl {

namespace {

// Stream layout per chain seed: 0 drives the population layers, 1 is
// reserved for evaluation, individual n gets 2 + n. Keeping individuals on
// their own streams makes chain output independent of worker count.
constexpr std::uint64_t kPopulationStream = 0;
constexpr std::uint64_t kIndividualStreamBase = 2;

void stat_from_samples(const std::vector<double>& xs, double* mean, double* sd) {
  const std::size_t n = xs.size();
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(n);
  double s2 = 0.0;
  if (n > 1) {
    for (double x : xs) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(n - 1);
  }
  *mean = m;
  *sd = std::sqrt(s2);
}

}  // namespace

void GibbsConfig::validate() const {
  if (max_epochs < 0) throw SpecError("max_epochs must be nonnegative");
  if (thin_interval < 1) throw SpecError("thin_interval must be positive");
  if (plot_interval < 1) throw SpecError("plot_interval must be positive");
  if (prior_dof < 0) throw SpecError("prior_dof must be nonnegative");
  if (eval_draws < 1) throw SpecError("eval_draws must be positive");
  if (summary_window < 1) throw SpecError("summary_window must be positive");
  if (workers < 0) throw SpecError("workers must be nonnegative");
}

Eigen::VectorXd sample_latent_mean(const Eigen::MatrixXd& latents,
                                   const Eigen::MatrixXd& latent_cov, RngStream& rng) {
  const int n = static_cast<int>(latents.rows());
  const int p = static_cast<int>(latents.cols());
  if (n < 1) throw SpecError("need at least one individual");
  const Eigen::VectorXd mean = latents.colwise().mean();
  const Eigen::MatrixXd chol = cholesky_psd_jittered(latent_cov);
  Eigen::VectorXd z(p);
  for (int i = 0; i < p; ++i) z[i] = rng.normal();
  return mean + (chol * z) / std::sqrt(static_cast<double>(n));
}

Eigen::MatrixXd sample_latent_cov(const Eigen::MatrixXd& latents,
                                  const Eigen::VectorXd& latent_mean, int prior_dof,
                                  RngStream& rng) {
  const int n = static_cast<int>(latents.rows());
  const int p = static_cast<int>(latents.cols());
  if (n < 1) throw SpecError("need at least one individual");
  const double k = prior_dof > 0 ? prior_dof : p;
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = latents.row(i).transpose() - latent_mean;
    scatter += d * d.transpose();
  }
  const Eigen::MatrixXd scale = k * Eigen::MatrixXd::Identity(p, p) + scatter;
  return sample_inverse_wishart(k + n, scale, rng);
}

GibbsSampler::GibbsSampler(const DesignMatrix& design, const GibbsConfig& config)
    : design_(design), config_(config), population_stream_(config.seed, kPopulationStream) {
  config_.validate();
  workers_ = config_.workers;
  if (workers_ == 0) {
    workers_ = static_cast<int>(std::thread::hardware_concurrency());
    if (workers_ < 1) workers_ = 1;
  }
  const int n = design_.num_individuals();
  workers_ = std::min(workers_, std::max(n, 1));
  if (workers_ > 1) pool_ = std::make_unique<ThreadPool>(workers_);
  latent_streams_.reserve(n);
  for (int i = 0; i < n; ++i) {
    latent_streams_.emplace_back(config_.seed, kIndividualStreamBase + i);
  }
  scratch_.resize(static_cast<std::size_t>(workers_) * design_.max_rows_per_individual());
  accept_flags_.assign(n, 0);
}

void GibbsSampler::reset(ChainState state) {
  const int n = design_.num_individuals();
  const int p = design_.num_random();
  const int q = design_.num_fixed();
  if (state.latents.rows() != n || state.latents.cols() != p) {
    throw SpecError("latent matrix shape does not match the dataset");
  }
  if (state.params.fixed_coefs.size() != q || state.params.latent_mean.size() != p) {
    throw SpecError("parameter shapes do not match the spec");
  }
  if (state.tuning.fixed_scale.size() != q) {
    throw SpecError("tuning shape does not match the spec");
  }
  state_ = std::move(state);
  population_stream_ = RngStream(config_.seed, kPopulationStream);
  for (int i = 0; i < n; ++i) {
    latent_streams_[i] = RngStream(config_.seed, kIndividualStreamBase + i);
  }
  refresh_caches();
}

void GibbsSampler::refresh_caches() {
  const int n = design_.num_individuals();
  const int p = design_.num_random();
  transformed_.resize(n, p);
  const auto& kinds = design_.random_kinds();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      transformed_(i, j) = transform_one(state_.latents(i, j), kinds[j]);
    }
  }
  cov_chol_ = cholesky_psd_jittered(state_.params.latent_cov);
  cached_loglik_.assign(n, 0.0);
  total_log_likelihood(state_.params.fixed_coefs, &cached_loglik_);
}

double GibbsSampler::total_log_likelihood(const Eigen::VectorXd& fixed_coefs,
                                          std::vector<double>* per_individual) {
  const int n = design_.num_individuals();
  const auto& backend = kern::active_backend();
  const int n_coef = design_.num_coefficients();
  const int max_rows = design_.max_rows_per_individual();
  auto body = [&](int worker, int begin, int end) {
    double* slab = scratch_.data() + static_cast<std::size_t>(worker) * max_rows;
    std::vector<double> w(n_coef);
    for (int i = begin; i < end; ++i) {
      design_.assemble_weights(transformed_.row(i).transpose(), fixed_coefs, w.data());
      (*per_individual)[i] =
          panel_log_likelihood(design_.individual(i), w.data(), slab, backend);
    }
  };
  if (pool_) {
    pool_->parallel_for(n, body);
  } else {
    body(0, 0, n);
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += (*per_individual)[i];
  return total;
}

void GibbsSampler::update_latents() {
  const int n = design_.num_individuals();
  const int p = design_.num_random();
  const auto& backend = kern::active_backend();
  const auto& kinds = design_.random_kinds();
  const int n_coef = design_.num_coefficients();
  const int max_rows = design_.max_rows_per_individual();
  const double step = state_.tuning.latent_step;
  const Eigen::VectorXd& mean = state_.params.latent_mean;
  const Eigen::VectorXd& fixed = state_.params.fixed_coefs;

  auto body = [&](int worker, int begin, int end) {
    double* slab = scratch_.data() + static_cast<std::size_t>(worker) * max_rows;
    std::vector<double> w(n_coef);
    Eigen::VectorXd z(p);
    Eigen::VectorXd proposal(p);
    Eigen::VectorXd transformed(p);
    for (int i = begin; i < end; ++i) {
      RngStream& rng = latent_streams_[i];
      for (int j = 0; j < p; ++j) z[j] = rng.normal();
      proposal = state_.latents.row(i).transpose() + step * (cov_chol_ * z);
      for (int j = 0; j < p; ++j) transformed[j] = transform_one(proposal[j], kinds[j]);
      design_.assemble_weights(transformed, fixed, w.data());
      const double loglik =
          panel_log_likelihood(design_.individual(i), w.data(), slab, backend);
      const double prior_cur = -0.5 * quad_form_chol(
          cov_chol_, state_.latents.row(i).transpose() - mean);
      const double prior_prop = -0.5 * quad_form_chol(cov_chol_, proposal - mean);
      const double delta = (loglik + prior_prop) - (cached_loglik_[i] + prior_cur);
      const double log_u = std::log(rng.uniform_pos());
      if (delta >= 0.0 || log_u < delta) {
        state_.latents.row(i) = proposal.transpose();
        transformed_.row(i) = transformed.transpose();
        cached_loglik_[i] = loglik;
        accept_flags_[i] = 1;
      } else {
        accept_flags_[i] = 0;
      }
    }
  };
  if (pool_) {
    pool_->parallel_for(n, body);
  } else {
    body(0, 0, n);
  }

  long long accepts = 0;
  for (int i = 0; i < n; ++i) accepts += accept_flags_[i];
  const double rate = static_cast<double>(accepts) / n;
  state_.tuning.latent_step = adapt_step_size(state_.tuning.latent_step, rate);
}

void GibbsSampler::update_fixed() {
  const int q = design_.num_fixed();
  if (q == 0) return;
  MhTuning& tuning = state_.tuning;
  Eigen::VectorXd z(q);
  for (int j = 0; j < q; ++j) z[j] = population_stream_.normal();
  const Eigen::VectorXd proposal =
      state_.params.fixed_coefs +
      tuning.fixed_step * tuning.fixed_scale.cwiseProduct(z);

  std::vector<double> proposal_loglik(design_.num_individuals(), 0.0);
  const double total_prop = total_log_likelihood(proposal, &proposal_loglik);
  double total_cur = 0.0;
  for (double v : cached_loglik_) total_cur += v;

  const double log_u = std::log(population_stream_.uniform_pos());
  const double delta = total_prop - total_cur;
  const bool accepted = delta >= 0.0 || log_u < delta;
  if (accepted) {
    state_.params.fixed_coefs = proposal;
    cached_loglik_.swap(proposal_loglik);
  }
  tuning.observe_fixed(state_.params.fixed_coefs);

  // One proposal per epoch, so the acceptance rate only means something over
  // a window of recent epochs.
  tuning.record_fixed(accepted);
  if (tuning.fixed_window_size == MhTuning::kFixedWindow) {
    tuning.fixed_step = adapt_step_size(tuning.fixed_step, tuning.fixed_rate());
  }
}

void GibbsSampler::run_epoch() {
  const int p = design_.num_random();
  if (p > 0) {
    update_latents();
    state_.params.latent_mean =
        sample_latent_mean(state_.latents, state_.params.latent_cov, population_stream_);
    state_.params.latent_cov = sample_latent_cov(
        state_.latents, state_.params.latent_mean, config_.prior_dof, population_stream_);
    cov_chol_ = cholesky_psd_jittered(state_.params.latent_cov);
  }
  update_fixed();
  ++state_.epoch;
}

ChainState gibbs_epoch(const ChainState& state, const DesignMatrix& design,
                       const GibbsConfig& config) {
  GibbsSampler sampler(design, config);
  sampler.reset(state);
  sampler.run_epoch();
  return sampler.state();
}

ChainState run_chain(const DesignMatrix& design, const GibbsConfig& config,
                     ChainState init, RetainedDraws& draws, const ChainMonitor& monitor) {
  GibbsSampler sampler(design, config);
  sampler.reset(std::move(init));
  for (int i = 0; i < config.max_epochs; ++i) {
    sampler.run_epoch();
    const ChainState& s = sampler.state();
    if (s.epoch % config.thin_interval == 0) {
      draws.push_back(Draw{s.epoch, s.params.fixed_coefs, s.params.latent_mean,
                           s.params.latent_cov, s.latents});
      if (monitor && !monitor(s.epoch, s, draws)) break;
    }
  }
  return sampler.state();
}

PosteriorSummary summarize_posterior(const UtilitySpec& spec, const RetainedDraws& draws,
                                     int window) {
  if (draws.empty()) throw SpecError("cannot summarize an empty draw list");
  if (window < 1) throw SpecError("summary window must be positive");
  const int total = static_cast<int>(draws.size());
  const int w = std::min(window, total);
  const int first = total - w;
  const int p = static_cast<int>(draws.back().latent_mean.size());
  const int q = static_cast<int>(draws.back().fixed_coefs.size());
  const auto kinds = spec.random_kinds();
  const auto rnames = spec.random_names();
  const auto fnames = spec.fixed_names();

  PosteriorSummary out;
  out.random_kinds = kinds;
  out.draw_count = w;
  out.epoch = draws.back().epoch;
  out.latent_mean_mean = Eigen::VectorXd::Zero(p);
  out.latent_cov_mean = Eigen::MatrixXd::Zero(p, p);
  out.fixed_mean = Eigen::VectorXd::Zero(q);

  std::vector<double> xs;
  xs.reserve(w);
  for (int j = 0; j < p; ++j) {
    xs.clear();
    for (int d = first; d < total; ++d) xs.push_back(draws[d].latent_mean[j]);
    CoefStat st{rnames[j], 0.0, 0.0};
    stat_from_samples(xs, &st.mean, &st.sd);
    out.latent_mean_stats.push_back(st);
    out.latent_mean_mean[j] = st.mean;
  }
  for (int j = 0; j < p; ++j) {
    xs.clear();
    for (int d = first; d < total; ++d) xs.push_back(std::sqrt(draws[d].latent_cov(j, j)));
    CoefStat st{rnames[j], 0.0, 0.0};
    stat_from_samples(xs, &st.mean, &st.sd);
    out.latent_sd_stats.push_back(st);
  }
  for (int d = first; d < total; ++d) out.latent_cov_mean += draws[d].latent_cov;
  if (w > 0) out.latent_cov_mean /= static_cast<double>(w);

  for (int j = 0; j < q; ++j) {
    xs.clear();
    for (int d = first; d < total; ++d) xs.push_back(draws[d].fixed_coefs[j]);
    CoefStat st{fnames[j], 0.0, 0.0};
    stat_from_samples(xs, &st.mean, &st.sd);
    out.fixed_stats.push_back(st);
    out.fixed_mean[j] = st.mean;
  }

  const int n = p > 0 ? static_cast<int>(draws.back().latents.rows()) : 0;
  for (int j = 0; j < p; ++j) {
    xs.clear();
    xs.reserve(static_cast<std::size_t>(w) * n);
    for (int d = first; d < total; ++d) {
      for (int i = 0; i < n; ++i) {
        xs.push_back(transform_one(draws[d].latents(i, j), kinds[j]));
      }
    }
    CoefStat st{rnames[j], 0.0, 0.0};
    stat_from_samples(xs, &st.mean, &st.sd);
    out.simulated_stats.push_back(st);
  }
  return out;
}

PosteriorSummary summary_from_state(const UtilitySpec& spec, const ChainState& state) {
  const int p = static_cast<int>(state.params.latent_mean.size());
  const int q = static_cast<int>(state.params.fixed_coefs.size());
  const auto kinds = spec.random_kinds();
  const auto rnames = spec.random_names();
  const auto fnames = spec.fixed_names();

  PosteriorSummary out;
  out.random_kinds = kinds;
  out.draw_count = 0;
  out.epoch = state.epoch;
  out.latent_mean_mean = state.params.latent_mean;
  out.latent_cov_mean = state.params.latent_cov;
  out.fixed_mean = state.params.fixed_coefs;
  for (int j = 0; j < p; ++j) {
    out.latent_mean_stats.push_back({rnames[j], state.params.latent_mean[j], 0.0});
    out.latent_sd_stats.push_back(
        {rnames[j], std::sqrt(state.params.latent_cov(j, j)), 0.0});
  }
  for (int j = 0; j < q; ++j) {
    out.fixed_stats.push_back({fnames[j], state.params.fixed_coefs[j], 0.0});
  }
  const int n = static_cast<int>(state.latents.rows());
  std::vector<double> xs;
  for (int j = 0; j < p; ++j) {
    xs.clear();
    for (int i = 0; i < n; ++i) {
      xs.push_back(transform_one(state.latents(i, j), kinds[j]));
    }
    CoefStat st{rnames[j], 0.0, 0.0};
    if (!xs.empty()) stat_from_samples(xs, &st.mean, &st.sd);
    out.simulated_stats.push_back(st);
  }
  return out;
}

}  // namespace mixl

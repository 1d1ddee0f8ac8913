#include "mixl/esbda.hpp"

#include <cmath>
#include <limits>

#include "mixl/errors.hpp"
#include "mixl/io.hpp"
#include "mixl/log.hpp"

namespace mixl {

namespace {

constexpr std::uint64_t kEvaluationStream = 1;

// Window-mean parameters at a checkpoint, falling back to the state.
ModelParams checkpoint_params(const ChainState& state, const RetainedDraws& draws,
                              int window) {
  if (draws.empty()) return state.params;
  const int total = static_cast<int>(draws.size());
  const int w = std::min(window, total);
  const int first = total - w;
  ModelParams params;
  params.fixed_coefs = Eigen::VectorXd::Zero(draws.back().fixed_coefs.size());
  params.latent_mean = Eigen::VectorXd::Zero(draws.back().latent_mean.size());
  params.latent_cov =
      Eigen::MatrixXd::Zero(draws.back().latent_cov.rows(), draws.back().latent_cov.cols());
  for (int d = first; d < total; ++d) {
    params.fixed_coefs += draws[d].fixed_coefs;
    params.latent_mean += draws[d].latent_mean;
    params.latent_cov += draws[d].latent_cov;
  }
  params.fixed_coefs /= static_cast<double>(w);
  params.latent_mean /= static_cast<double>(w);
  params.latent_cov /= static_cast<double>(w);
  return params;
}

}  // namespace

void EarlyStopConfig::validate(int thin_interval) const {
  if (!enabled) return;
  if (patience < thin_interval || patience % thin_interval != 0) {
    throw SpecError("patience must be a positive multiple of the checkpoint interval");
  }
  if (min_epochs < 0) throw SpecError("min_epochs must be nonnegative");
}

StopDecision should_stop(const ValidationTrace& trace, const EarlyStopConfig& config) {
  if (!config.enabled || trace.points.empty() || trace.best_epoch < 0) {
    return StopDecision::Continue;
  }
  const int current = trace.points.back().epoch;
  if (current < config.min_epochs) return StopDecision::Continue;
  return current - trace.best_epoch >= config.patience ? StopDecision::Stop
                                                       : StopDecision::Continue;
}

ChainState init_from_prior(const PriorModel& prior, const DesignMatrix& design) {
  const UtilitySpec& spec = design.spec();
  if (prior.spec_hash != spec_hash(spec)) {
    throw SpecError("prior model was estimated under a different spec");
  }
  prior.params.validate(spec);
  ChainState state;
  state.params = prior.params;
  state.latents = prior.params.latent_mean.transpose().replicate(design.num_individuals(), 1);
  state.tuning = MhTuning::make(design.num_random(), design.num_fixed());
  state.epoch = 0;
  return state;
}

ChainState nonconjugate_init(const DesignMatrix& design) {
  const int p = design.num_random();
  const int q = design.num_fixed();
  ChainState state;
  state.params.fixed_coefs = Eigen::VectorXd::Zero(q);
  state.params.latent_mean = Eigen::VectorXd::Zero(p);
  state.params.latent_cov = Eigen::MatrixXd::Identity(p, p);
  state.latents = Eigen::MatrixXd::Zero(design.num_individuals(), p);
  state.tuning = MhTuning::make(p, q);
  state.epoch = 0;
  return state;
}

double checkpoint_evaluate(const ChainState& state, const RetainedDraws& draws,
                           int window, const DesignMatrix& validation, int draw_count,
                           std::uint64_t seed) {
  const ModelParams params = checkpoint_params(state, draws, window);
  RngStream rng(seed, kEvaluationStream);
  return simulated_cel(validation, params, draw_count, rng);
}

EsbdaResult run_esbda(const DesignMatrix& train, const DesignMatrix* validation,
                      const std::optional<PriorModel>& prior, const GibbsConfig& config,
                      const EarlyStopConfig& stop, const CheckpointEvaluator& evaluator_override) {
  config.validate();
  stop.validate(config.thin_interval);
  if (stop.enabled && validation == nullptr && !evaluator_override) {
    throw SpecError("early stopping needs a validation set");
  }

  ChainState init = prior ? init_from_prior(*prior, train) : nonconjugate_init(train);

  EsbdaResult result;
  result.trace.best_validation_cel = std::numeric_limits<double>::infinity();

  // Best-checkpoint payload, deep-copied so later epochs cannot touch it.
  RetainedDraws best_window;
  ChainState best_state;
  bool have_best = false;

  RetainedDraws draws;
  const int window = config.summary_window;

  auto monitor = [&](int epoch, const ChainState& state, const RetainedDraws& all) -> bool {
    double train_cel_value;
    {
      RngStream rng(config.seed, kEvaluationStream);
      train_cel_value = simulated_cel(
          train, checkpoint_params(state, all, window), config.eval_draws, rng);
    }
    double validation_cel_value = std::numeric_limits<double>::quiet_NaN();
    if (evaluator_override) {
      validation_cel_value = evaluator_override(epoch, state, all);
    } else if (validation != nullptr) {
      validation_cel_value =
          checkpoint_evaluate(state, all, window, *validation, config.eval_draws, config.seed);
    }

    TracePoint point{epoch, train_cel_value, validation_cel_value, false};
    const bool has_validation = !std::isnan(validation_cel_value);
    if (has_validation && validation_cel_value < result.trace.best_validation_cel) {
      point.improved = true;
      result.trace.best_validation_cel = validation_cel_value;
      result.trace.best_epoch = epoch;
      const int total = static_cast<int>(all.size());
      const int w = std::min(window, total);
      best_window.assign(all.end() - w, all.end());
      best_state = state;
      have_best = true;
    }
    result.trace.points.push_back(point);
    return should_stop(result.trace, stop) == StopDecision::Continue;
  };

  result.final_state = run_chain(train, config, std::move(init), draws, monitor);
  result.stop_epoch = result.final_state.epoch;
  result.stopped_early = stop.enabled && should_stop(result.trace, stop) == StopDecision::Stop;

  if (stop.enabled && have_best) {
    result.summary = summarize_posterior(train.spec(), best_window, window);
    result.output_epoch = result.trace.best_epoch;
  } else if (!draws.empty()) {
    result.summary = summarize_posterior(train.spec(), draws, window);
    result.output_epoch = draws.back().epoch;
  } else {
    result.summary = summary_from_state(train.spec(), result.final_state);
    result.output_epoch = result.final_state.epoch;
  }
  if (result.stopped_early) {
    log_info("early stop at epoch " + std::to_string(result.stop_epoch) +
             ", output epoch " + std::to_string(result.output_epoch));
  }
  return result;
}

MetricsPair direct_application(const PriorModel& prior, const DesignMatrix& eval,
                               int draw_count, std::uint64_t seed) {
  if (prior.spec_hash != spec_hash(eval.spec())) {
    throw SpecError("prior model was estimated under a different spec");
  }
  RngStream rng(seed, kEvaluationStream);
  return metrics_from_cel(simulated_cel(eval, prior.params, draw_count, rng));
}

PriorModel extract_prior(const PosteriorSummary& summary, const UtilitySpec& spec,
                         const std::string& provenance, std::uint64_t seed) {
  PriorModel prior;
  prior.params.fixed_coefs = summary.fixed_mean;
  prior.params.latent_mean = summary.latent_mean_mean;
  prior.params.latent_cov = summary.latent_cov_mean;
  prior.spec_hash = spec_hash(spec);
  prior.provenance = provenance;
  prior.seed = seed;
  return prior;
}

std::string trace_csv(const ValidationTrace& trace) {
  std::string out = "epoch,train_cel,validation_cel,best_so_far\n";
  for (const auto& p : trace.points) {
    out += std::to_string(p.epoch) + "," + format_double(p.train_cel) + ",";
    if (!std::isnan(p.validation_cel)) out += format_double(p.validation_cel);
    out += ",";
    out += p.improved ? "1" : "0";
    out += "\n";
  }
  return out;
}

}  // namespace mixl

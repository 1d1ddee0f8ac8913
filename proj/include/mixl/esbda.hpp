#pragma once

#include <functional>
#include <optional>

#include "mixl/design.hpp"
#include "mixl/gibbs.hpp"
#include "mixl/metrics.hpp"
#include "mixl/params.hpp"

namespace mixl {

struct EarlyStopConfig {
  bool enabled = true;
  int patience = 200;   // epochs without validation improvement before stopping
  int min_epochs = 0;   // stopping not considered before this epoch

  void validate(int thin_interval) const;  // patience must align with checkpoints
};

struct TracePoint {
  int epoch = 0;
  double train_cel = 0.0;
  double validation_cel = 0.0;  // NaN when no validation set
  bool improved = false;        // became the best checkpoint when recorded
};

struct ValidationTrace {
  std::vector<TracePoint> points;
  int best_epoch = -1;
  double best_validation_cel = 0.0;
};

enum class StopDecision { Continue, Stop };

// Stop once the epoch of the best validation loss is `patience` epochs or
// more behind the current one (and past min_epochs). Ties keep the earliest
// best epoch alive.
StopDecision should_stop(const ValidationTrace& trace, const EarlyStopConfig& config);

struct EsbdaResult {
  PosteriorSummary summary;
  ValidationTrace trace;
  ChainState final_state;
  bool stopped_early = false;
  int stop_epoch = 0;    // epoch the chain halted at
  int output_epoch = 0;  // epoch the summary comes from (best checkpoint)
};

// Chain start injected from a transferred prior: latent mean, covariance and
// fixed coefficients from the prior, every individual's latent at the mean.
// Validates the spec hash. Throws SpecError on mismatch.
ChainState init_from_prior(const PriorModel& prior, const DesignMatrix& design);

// Neutral start for estimation without a prior: zero means, identity
// covariance, zero fixed coefficients.
ChainState nonconjugate_init(const DesignMatrix& design);

// Simulated validation loss at a checkpoint: parameters are the means over
// the trailing draw window (the chain state if the window is empty), with the
// same evaluation seed every call so checkpoints share their random numbers.
double checkpoint_evaluate(const ChainState& state, const RetainedDraws& draws,
                           int window, const DesignMatrix& validation, int draw_count,
                           std::uint64_t seed);

// Evaluation hook, replaceable in tests: (epoch, state, draws) -> validation
// loss at that checkpoint.
using CheckpointEvaluator =
    std::function<double(int epoch, const ChainState& state, const RetainedDraws& draws)>;

// Assimilation run: Gibbs chain with periodic validation checkpoints, early
// stopping on the validation loss, and the returned summary reconstructed
// from the best checkpoint's draw window rather than the final state. With
// stopping disabled (or no improvement horizon hit) the summary covers the
// final window. `validation` may be null only when stopping is disabled.
EsbdaResult run_esbda(const DesignMatrix& train, const DesignMatrix* validation,
                      const std::optional<PriorModel>& prior, const GibbsConfig& config,
                      const EarlyStopConfig& stop,
                      const CheckpointEvaluator& evaluator_override = {});

// Evaluate a transferred model on a dataset as-is, no re-estimation.
MetricsPair direct_application(const PriorModel& prior, const DesignMatrix& eval,
                               int draw_count, std::uint64_t seed);

// Package a summary's window means as a transferable prior.
PriorModel extract_prior(const PosteriorSummary& summary, const UtilitySpec& spec,
                         const std::string& provenance, std::uint64_t seed);

// CSV rendering of a trace: epoch,train_cel,validation_cel,best_so_far. The
// validation field is empty when no validation set was given.
std::string trace_csv(const ValidationTrace& trace);

}  // namespace mixl

#pragma once

#include <Eigen/Dense>

#include "mixl/data.hpp"
#include "mixl/params.hpp"
#include "mixl/rng.hpp"
#include "mixl/spec.hpp"

namespace mixl {

// Reference implementations of the model equations. These interpret a
// UtilitySpec directly, one situation at a time; the estimation engine uses
// the compiled design-matrix path in design.hpp, which is tested against
// these.

// Apply each random coefficient's transform to a latent vector.
Eigen::VectorXd transform_latent(const Eigen::VectorXd& latent,
                                 const std::vector<CoefficientKind>& kinds);

// Systematic utility per alternative. Unavailable alternatives get NaN, which
// choice_probabilities never reads.
Eigen::VectorXd systematic_utility(const UtilitySpec& spec,
                                   const Eigen::VectorXd& fixed_coefs,
                                   const Eigen::VectorXd& transformed_random,
                                   const ChoiceSituation& situation);

// Softmax over available alternatives, max-shifted for stability. Unavailable
// entries are exactly zero; available entries sum to one.
Eigen::VectorXd choice_probabilities(const Eigen::VectorXd& utilities,
                                     const std::vector<std::uint8_t>& available);

// Log product over the panel of the chosen alternative's probability, for
// one individual's latent vector (transform applied inside).
double panel_log_likelihood(const UtilitySpec& spec, const Individual& individual,
                            const Eigen::VectorXd& fixed_coefs,
                            const Eigen::VectorXd& latent);

double panel_likelihood(const UtilitySpec& spec, const Individual& individual,
                        const Eigen::VectorXd& fixed_coefs,
                        const Eigen::VectorXd& latent);

// Monte Carlo average of choice probabilities over latent draws from
// N(latent_mean, latent_cov). Deterministic given the stream state.
Eigen::VectorXd unconditional_choice_probability(const ModelParams& params,
                                                 const UtilitySpec& spec,
                                                 const ChoiceSituation& situation,
                                                 int draw_count, RngStream& rng);

}  // namespace mixl

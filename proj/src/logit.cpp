#include "mixl/logit.hpp"

#include <cmath>
#include <limits>

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"

namespace mixl {

Eigen::VectorXd transform_latent(const Eigen::VectorXd& latent,
                                 const std::vector<CoefficientKind>& kinds) {
  if (latent.size() != static_cast<Eigen::Index>(kinds.size())) {
    throw SpecError("latent vector length does not match the random coefficients");
  }
  Eigen::VectorXd out(latent.size());
  for (Eigen::Index i = 0; i < latent.size(); ++i) {
    out[i] = transform_one(latent[i], kinds[i]);
  }
  return out;
}

Eigen::VectorXd systematic_utility(const UtilitySpec& spec,
                                   const Eigen::VectorXd& fixed_coefs,
                                   const Eigen::VectorXd& transformed_random,
                                   const ChoiceSituation& situation) {
  if (fixed_coefs.size() != spec.num_fixed()) {
    throw SpecError("fixed coefficient vector has the wrong length");
  }
  if (transformed_random.size() != spec.num_random()) {
    throw SpecError("random coefficient vector has the wrong length");
  }
  const int num_alts = spec.num_alternatives();
  Eigen::VectorXd v =
      Eigen::VectorXd::Constant(num_alts, std::numeric_limits<double>::quiet_NaN());
  for (int a = 0; a < num_alts; ++a) {
    if (!situation.available[a]) continue;
    double u = 0.0;
    int r = 0;
    int f = 0;
    for (const auto& coef : spec.coefficients) {
      const double w = is_random(coef.kind) ? transformed_random[r++] : fixed_coefs[f++];
      if (!spec.applies(coef, a)) continue;
      const double x = coef.attribute == kConstAttribute
                           ? 1.0
                           : situation.attributes(a, spec.attribute_index(coef.attribute));
      u += w * x;
    }
    v[a] = u;
  }
  return v;
}

Eigen::VectorXd choice_probabilities(const Eigen::VectorXd& utilities,
                                     const std::vector<std::uint8_t>& available) {
  const int n = static_cast<int>(utilities.size());
  if (static_cast<int>(available.size()) != n) {
    throw SpecError("availability mask length does not match utilities");
  }
  double vmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (available[i] && utilities[i] > vmax) vmax = utilities[i];
  }
  if (!std::isfinite(vmax)) throw NumericalError("no available alternative");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!available[i]) continue;
    p[i] = std::exp(utilities[i] - vmax);
    denom += p[i];
  }
  for (int i = 0; i < n; ++i) {
    if (available[i]) p[i] /= denom;
  }
  return p;
}

double panel_log_likelihood(const UtilitySpec& spec, const Individual& individual,
                            const Eigen::VectorXd& fixed_coefs,
                            const Eigen::VectorXd& latent) {
  const Eigen::VectorXd transformed = transform_latent(latent, spec.random_kinds());
  const int num_alts = spec.num_alternatives();
  double ll = 0.0;
  for (const auto& s : individual.situations) {
    const Eigen::VectorXd v = systematic_utility(spec, fixed_coefs, transformed, s);
    double vmax = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < num_alts; ++a) {
      if (s.available[a] && v[a] > vmax) vmax = v[a];
    }
    double denom = 0.0;
    for (int a = 0; a < num_alts; ++a) {
      if (s.available[a]) denom += std::exp(v[a] - vmax);
    }
    ll += v[s.chosen] - vmax - std::log(denom);
  }
  return ll;
}

double panel_likelihood(const UtilitySpec& spec, const Individual& individual,
                        const Eigen::VectorXd& fixed_coefs,
                        const Eigen::VectorXd& latent) {
  return std::exp(panel_log_likelihood(spec, individual, fixed_coefs, latent));
}

Eigen::VectorXd unconditional_choice_probability(const ModelParams& params,
                                                 const UtilitySpec& spec,
                                                 const ChoiceSituation& situation,
                                                 int draw_count, RngStream& rng) {
  if (draw_count < 1) throw SpecError("draw count must be positive");
  params.validate(spec);
  const int p = spec.num_random();
  const auto kinds = spec.random_kinds();
  const Eigen::MatrixXd chol = cholesky_psd_jittered(params.latent_cov);
  const int num_alts = spec.num_alternatives();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(num_alts);
  Eigen::VectorXd z(p);
  for (int r = 0; r < draw_count; ++r) {
    for (int i = 0; i < p; ++i) z[i] = rng.normal();
    const Eigen::VectorXd latent = params.latent_mean + chol * z;
    const Eigen::VectorXd transformed = transform_latent(latent, kinds);
    const Eigen::VectorXd v =
        systematic_utility(spec, params.fixed_coefs, transformed, situation);
    acc += choice_probabilities(v, situation.available);
  }
  return acc / static_cast<double>(draw_count);
}

}  // namespace mixl

#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixl/design.hpp"
#include "mixl/logit.hpp"

#include "oracles.hpp"

using namespace mixl;

namespace {

UtilitySpec full_spec() {
  UtilitySpec spec;
  spec.alternatives = {"car", "bus", "walk"};
  spec.attributes = {"cost", "time"};
  spec.coefficients = {
      {"b_cost", CoefficientKind::RandomLognormalNegative, "cost", {}},
      {"b_time", CoefficientKind::RandomNormal, "time", {}},
      {"c_bus", CoefficientKind::Fixed, "const", {"bus"}},
      {"c_walk", CoefficientKind::Fixed, "const", {"walk"}},
  };
  spec.validate();
  return spec;
}

Dataset random_dataset(const UtilitySpec& spec, int individuals, int situations,
                       std::uint64_t seed, bool with_unavailable = false) {
  RngStream rng(seed, 0);
  Dataset ds;
  ds.spec = spec;
  const int j = spec.num_alternatives();
  const int a = static_cast<int>(spec.attributes.size());
  for (int n = 0; n < individuals; ++n) {
    Individual ind;
    ind.id = "i" + std::to_string(n);
    ind.group = ind.id;
    for (int s = 0; s < situations; ++s) {
      ChoiceSituation sit;
      sit.attributes = Eigen::MatrixXd(j, a);
      for (int r = 0; r < j; ++r) {
        for (int c = 0; c < a; ++c) sit.attributes(r, c) = rng.normal();
      }
      sit.available.assign(j, 1);
      if (with_unavailable && rng.uniform01() < 0.3) {
        sit.available[static_cast<int>(rng.uniform01() * j)] = 0;
      }
      int chosen = static_cast<int>(rng.uniform01() * j);
      while (!sit.available[chosen]) chosen = (chosen + 1) % j;
      sit.chosen = chosen;
      ind.situations.push_back(sit);
    }
    ds.individuals.push_back(ind);
  }
  ds.validate();
  return ds;
}

}  // namespace

TEST_CASE("compiled design mirrors the dataset structure") {
  const UtilitySpec spec = full_spec();
  const Dataset ds = random_dataset(spec, 4, 3, 99, true);
  const DesignMatrix design = DesignMatrix::compile(ds);
  CHECK(design.num_individuals() == 4);
  CHECK(design.num_coefficients() == 4);
  CHECK(design.num_random() == 2);
  CHECK(design.num_fixed() == 2);
  for (int n = 0; n < 4; ++n) {
    const IndividualDesign& ind = design.individual(n);
    CHECK(ind.num_situations() == 3);
    for (int s = 0; s < 3; ++s) {
      const auto& sit = ds.individuals[n].situations[s];
      const int rows = ind.situation_begin[s + 1] - ind.situation_begin[s];
      CHECK(rows == sit.num_available());
      // Chosen row points at the chosen alternative.
      const int chosen_global = ind.situation_begin[s] + ind.chosen_row[s];
      CHECK(ind.row_alternative[chosen_global] == sit.chosen);
    }
  }
}

TEST_CASE("design panel likelihood is bit-identical to the reference path") {
  const UtilitySpec spec = full_spec();
  const Dataset ds = random_dataset(spec, 6, 4, 123, true);
  const DesignMatrix design = DesignMatrix::compile(ds);
  RngStream rng(5, 0);
  std::vector<double> scratch(design.max_rows_per_individual());
  std::vector<double> w(design.num_coefficients());
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd latent(2), fixed(2);
    latent << rng.normal(), rng.normal();
    fixed << rng.normal(), rng.normal();
    const Eigen::VectorXd transformed =
        transform_latent(latent, design.random_kinds());
    design.assemble_weights(transformed, fixed, w.data());
    for (int n = 0; n < design.num_individuals(); ++n) {
      const double fast = panel_log_likelihood(design.individual(n), w.data(),
                                               scratch.data(), kern::scalar_backend());
      const double ref =
          panel_log_likelihood(spec, ds.individuals[n], fixed, latent);
      CHECK(fast == ref);  // same operations in the same order, exact match
    }
  }
}

TEST_CASE("design path is backend invariant bit for bit") {
  const UtilitySpec spec = full_spec();
  const Dataset ds = random_dataset(spec, 5, 6, 321, true);
  const DesignMatrix design = DesignMatrix::compile(ds);
  const kern::Backend& simd =
      kern::avx2_supported() ? kern::avx2_backend() : kern::neon_backend();
  std::vector<double> scratch(design.max_rows_per_individual());
  std::vector<double> w(design.num_coefficients(), 0.0);
  Eigen::VectorXd latent(2), fixed(2);
  latent << -0.3, 0.8;
  fixed << 0.2, -0.1;
  design.assemble_weights(transform_latent(latent, design.random_kinds()), fixed,
                          w.data());
  for (int n = 0; n < design.num_individuals(); ++n) {
    const double a = panel_log_likelihood(design.individual(n), w.data(),
                                          scratch.data(), kern::scalar_backend());
    const double b =
        panel_log_likelihood(design.individual(n), w.data(), scratch.data(), simd);
    CHECK(a == b);
  }
}

TEST_CASE("simulated cel matches the quadrature oracle") {
  // One normal random coefficient, two alternatives: the unconditional chosen
  // probability has a Gauss-Hermite closed form per situation.
  UtilitySpec spec;
  spec.alternatives = {"a", "b"};
  spec.attributes = {"x"};
  spec.coefficients = {{"b_x", CoefficientKind::RandomNormal, "x", {}}};
  spec.validate();

  const Dataset ds = random_dataset(spec, 8, 5, 777);
  const DesignMatrix design = DesignMatrix::compile(ds);

  ModelParams params;
  params.fixed_coefs = Eigen::VectorXd(0);
  params.latent_mean = Eigen::VectorXd::Constant(1, -0.4);
  params.latent_cov = Eigen::MatrixXd::Constant(1, 1, 0.36);

  double exact_cel = 0.0;
  int situations = 0;
  for (const auto& ind : ds.individuals) {
    for (const auto& sit : ind.situations) {
      const double x0 = sit.attributes(0, 0);
      const double x1 = sit.attributes(1, 0);
      const int c = sit.chosen;
      const double p = oracle::normal_expectation(
          [&](double b) {
            const double u0 = b * x0;
            const double u1 = b * x1;
            const double m = std::max(u0, u1);
            const double e0 = std::exp(u0 - m);
            const double e1 = std::exp(u1 - m);
            return (c == 0 ? e0 : e1) / (e0 + e1);
          },
          -0.4, 0.6);
      exact_cel -= std::log(p);
      ++situations;
    }
  }
  exact_cel /= situations;

  RngStream rng(42, 1);
  const double sim = simulated_cel(design, params, 200000, rng);
  CHECK(sim == doctest::Approx(exact_cel).epsilon(0.01));

  // Determinism: a fresh stream in the same state reproduces the value.
  RngStream rng2(42, 1);
  CHECK(simulated_cel(design, params, 200000, rng2) == sim);
}

TEST_CASE("simulated cel shares draws across individuals and situations") {
  // With a point-mass mixing distribution every draw is the mean, so the
  // simulated CEL equals the closed-form logit CEL regardless of draw count.
  const UtilitySpec spec = full_spec();
  const Dataset ds = random_dataset(spec, 3, 3, 11);
  const DesignMatrix design = DesignMatrix::compile(ds);
  ModelParams params;
  params.fixed_coefs = Eigen::Vector2d(0.3, -0.2);
  params.latent_mean = Eigen::Vector2d(-0.5, 0.4);
  params.latent_cov = Eigen::MatrixXd::Zero(2, 2);

  double exact = 0.0;
  int count = 0;
  const Eigen::VectorXd transformed =
      transform_latent(params.latent_mean, design.random_kinds());
  for (const auto& ind : ds.individuals) {
    for (const auto& sit : ind.situations) {
      const Eigen::VectorXd v =
          systematic_utility(spec, params.fixed_coefs, transformed, sit);
      const Eigen::VectorXd p = choice_probabilities(v, sit.available);
      exact -= std::log(p[sit.chosen]);
      ++count;
    }
  }
  exact /= count;
  RngStream rng(9, 1);
  CHECK(simulated_cel(design, params, 7, rng) == doctest::Approx(exact).epsilon(1e-12));
}

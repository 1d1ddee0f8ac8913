#include "mixl/design.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"
#include "mixl/logit.hpp"

namespace mixl {

DesignMatrix DesignMatrix::compile(const Dataset& dataset) {
  dataset.validate();
  DesignMatrix d;
  d.spec_ = dataset.spec;
  const UtilitySpec& spec = d.spec_;
  d.n_coef_ = static_cast<int>(spec.coefficients.size());
  d.slot_random_index_.assign(d.n_coef_, -1);
  d.slot_fixed_index_.assign(d.n_coef_, -1);
  int nr = 0;
  int nf = 0;
  for (int s = 0; s < d.n_coef_; ++s) {
    if (is_random(spec.coefficients[s].kind)) {
      d.slot_random_index_[s] = nr++;
      d.random_kinds_.push_back(spec.coefficients[s].kind);
    } else {
      d.slot_fixed_index_[s] = nf++;
    }
  }
  d.n_random_ = nr;
  d.n_fixed_ = nf;

  const int num_alts = spec.num_alternatives();
  d.individuals_.reserve(dataset.individuals.size());
  for (const auto& ind : dataset.individuals) {
    IndividualDesign comp;
    comp.id = ind.id;
    comp.group = ind.group;
    int rows = 0;
    for (const auto& s : ind.situations) rows += s.num_available();
    comp.rows = BlockedRowMatrix(rows, d.n_coef_);
    comp.situation_begin.reserve(ind.situations.size() + 1);
    comp.situation_begin.push_back(0);
    int row = 0;
    for (const auto& s : ind.situations) {
      int chosen_local = -1;
      for (int a = 0; a < num_alts; ++a) {
        if (!s.available[a]) continue;
        for (int slot = 0; slot < d.n_coef_; ++slot) {
          const auto& coef = spec.coefficients[slot];
          double x = 0.0;
          if (spec.applies(coef, a)) {
            x = coef.attribute == kConstAttribute
                    ? 1.0
                    : s.attributes(a, spec.attribute_index(coef.attribute));
          }
          comp.rows.set(row, slot, x);
        }
        comp.row_alternative.push_back(a);
        if (a == s.chosen) chosen_local = row - comp.situation_begin.back();
        ++row;
      }
      comp.chosen_row.push_back(chosen_local);
      comp.situation_begin.push_back(row);
    }
    d.n_situations_ += comp.num_situations();
    d.max_rows_ = std::max(d.max_rows_, comp.rows.padded_rows());
    d.individuals_.push_back(std::move(comp));
  }
  return d;
}

void DesignMatrix::assemble_weights(const Eigen::VectorXd& transformed_random,
                                    const Eigen::VectorXd& fixed_coefs,
                                    double* w) const {
  for (int slot = 0; slot < n_coef_; ++slot) {
    const int r = slot_random_index_[slot];
    w[slot] = r >= 0 ? transformed_random[r] : fixed_coefs[slot_fixed_index_[slot]];
  }
}

double panel_log_likelihood(const IndividualDesign& ind, const double* w,
                            double* scratch, const kern::Backend& backend) {
  utilities_blocked(ind.rows, w, scratch, backend);
  double ll = 0.0;
  const int num_sit = ind.num_situations();
  for (int s = 0; s < num_sit; ++s) {
    const int begin = ind.situation_begin[s];
    const int end = ind.situation_begin[s + 1];
    double vmax = scratch[begin];
    for (int i = begin + 1; i < end; ++i) vmax = std::max(vmax, scratch[i]);
    double denom = 0.0;
    for (int i = begin; i < end; ++i) denom += std::exp(scratch[i] - vmax);
    ll += scratch[begin + ind.chosen_row[s]] - vmax - std::log(denom);
  }
  return ll;
}

double simulated_cel(const DesignMatrix& design, const ModelParams& params,
                     int draw_count, RngStream& rng) {
  if (draw_count < 1) throw SpecError("draw count must be positive");
  params.validate(design.spec());
  const auto& backend = kern::active_backend();
  const int p = design.num_random();
  const auto& kinds = design.random_kinds();
  const Eigen::MatrixXd chol = cholesky_psd_jittered(params.latent_cov);

  int total_rows = 0;
  for (int n = 0; n < design.num_individuals(); ++n) {
    total_rows += design.individual(n).rows.rows();
  }
  std::vector<double> acc(total_rows, 0.0);
  std::vector<double> util(design.max_rows_per_individual());
  std::vector<double> prob(design.max_rows_per_individual());
  std::vector<double> w(design.num_coefficients());
  Eigen::VectorXd z(p);
  Eigen::VectorXd latent(p);

  for (int r = 0; r < draw_count; ++r) {
    for (int i = 0; i < p; ++i) z[i] = rng.normal();
    latent = params.latent_mean + chol * z;
    const Eigen::VectorXd transformed = transform_latent(latent, kinds);
    design.assemble_weights(transformed, params.fixed_coefs, w.data());

    int acc_offset = 0;
    for (int n = 0; n < design.num_individuals(); ++n) {
      const IndividualDesign& ind = design.individual(n);
      utilities_blocked(ind.rows, w.data(), util.data(), backend);
      const int num_sit = ind.num_situations();
      for (int s = 0; s < num_sit; ++s) {
        const int begin = ind.situation_begin[s];
        const int end = ind.situation_begin[s + 1];
        double vmax = util[begin];
        for (int i = begin + 1; i < end; ++i) vmax = std::max(vmax, util[i]);
        double denom = 0.0;
        for (int i = begin; i < end; ++i) {
          prob[i] = std::exp(util[i] - vmax);
          denom += prob[i];
        }
        for (int i = begin; i < end; ++i) prob[i] /= denom;
      }
      backend.axpy(ind.rows.rows(), 1.0, prob.data(), acc.data() + acc_offset);
      acc_offset += ind.rows.rows();
    }
  }

  double loss = 0.0;
  int acc_offset = 0;
  for (int n = 0; n < design.num_individuals(); ++n) {
    const IndividualDesign& ind = design.individual(n);
    const int num_sit = ind.num_situations();
    for (int s = 0; s < num_sit; ++s) {
      const int chosen = acc_offset + ind.situation_begin[s] + ind.chosen_row[s];
      const double pc = std::max(acc[chosen] / draw_count, DBL_MIN);
      loss -= std::log(pc);
    }
    acc_offset += ind.rows.rows();
  }
  return loss / design.num_situations();
}

}  // namespace mixl

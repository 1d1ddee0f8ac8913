#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixl/data.hpp"
#include "mixl/kernels.hpp"
#include "mixl/params.hpp"
#include "mixl/rng.hpp"

namespace mixl {

// Compiled per-individual design: one row per (situation, available
// alternative), columns in coefficient slot order, so utility is a plain
// dot product with the assembled weight vector.
struct IndividualDesign {
  BlockedRowMatrix rows;
  std::vector<std::int32_t> situation_begin;  // size num_situations + 1
  std::vector<std::int32_t> chosen_row;       // per situation, local row index
  std::vector<std::int32_t> row_alternative;  // per row, alternative index
  std::string id;
  std::string group;

  int num_situations() const { return static_cast<int>(chosen_row.size()); }
};

// Whole-dataset compiled form used by the sampler and evaluators.
class DesignMatrix {
 public:
  static DesignMatrix compile(const Dataset& dataset);

  const UtilitySpec& spec() const { return spec_; }
  int num_coefficients() const { return n_coef_; }
  int num_random() const { return n_random_; }
  int num_fixed() const { return n_fixed_; }
  int num_individuals() const { return static_cast<int>(individuals_.size()); }
  int num_situations() const { return n_situations_; }
  int max_rows_per_individual() const { return max_rows_; }
  const IndividualDesign& individual(int n) const { return individuals_[n]; }

  // Weight vector in slot order from a transformed random vector and the
  // fixed coefficients.
  void assemble_weights(const Eigen::VectorXd& transformed_random,
                        const Eigen::VectorXd& fixed_coefs, double* w) const;

  const std::vector<CoefficientKind>& random_kinds() const { return random_kinds_; }

 private:
  UtilitySpec spec_;
  std::vector<IndividualDesign> individuals_;
  std::vector<CoefficientKind> random_kinds_;
  std::vector<int> slot_random_index_;  // per slot, index into randoms or -1
  std::vector<int> slot_fixed_index_;   // per slot, index into fixed or -1
  int n_coef_ = 0;
  int n_random_ = 0;
  int n_fixed_ = 0;
  int n_situations_ = 0;
  int max_rows_ = 0;
};

// Panel log likelihood for one compiled individual under weight vector w.
// scratch must hold at least design.rows.padded_rows() doubles.
double panel_log_likelihood(const IndividualDesign& ind, const double* w,
                            double* scratch, const kern::Backend& backend);

// Simulated unconditional metrics over a compiled dataset. Draws `draw_count`
// latent vectors once and shares them across situations (common random
// numbers), averages the per-situation chosen-alternative probability, and
// returns the cross-entropy loss of those averages. Individual weights use
// the population draws, not per-individual latents.
double simulated_cel(const DesignMatrix& design, const ModelParams& params,
                     int draw_count, RngStream& rng);

}  // namespace mixl

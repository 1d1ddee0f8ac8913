#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mixl/spec.hpp"

namespace mixl {

// One observed choice: attribute values per alternative, availability mask,
// and the index of the chosen (available) alternative.
struct ChoiceSituation {
  Eigen::MatrixXd attributes;       // num_alternatives x num_attributes
  std::vector<std::uint8_t> available;
  int chosen = -1;

  int num_available() const;
};

struct Individual {
  std::string id;
  std::string group;  // sampling unit for splits (household etc.)
  std::vector<ChoiceSituation> situations;
};

struct Dataset {
  UtilitySpec spec;
  std::vector<Individual> individuals;

  int num_individuals() const { return static_cast<int>(individuals.size()); }
  int num_situations() const;

  // Throws DataError when shapes are inconsistent with the spec or a
  // situation breaks the rules (chosen unavailable, fewer than two available
  // alternatives, empty panel).
  void validate() const;
};

}  // namespace mixl

#include "mixl/data.hpp"

#include "mixl/errors.hpp"

namespace mixl {

int ChoiceSituation::num_available() const {
  int n = 0;
  for (auto a : available) n += a ? 1 : 0;
  return n;
}

int Dataset::num_situations() const {
  int n = 0;
  for (const auto& ind : individuals) n += static_cast<int>(ind.situations.size());
  return n;
}

void Dataset::validate() const {
  spec.validate();
  const int num_alts = spec.num_alternatives();
  const int num_attrs = static_cast<int>(spec.attributes.size());
  if (individuals.empty()) throw DataError("dataset has no individuals");
  for (const auto& ind : individuals) {
    if (ind.situations.empty()) {
      throw DataError("individual " + ind.id + " has no situations");
    }
    for (const auto& s : ind.situations) {
      if (s.attributes.rows() != num_alts || s.attributes.cols() != num_attrs) {
        throw DataError("individual " + ind.id + " has a situation with wrong shape");
      }
      if (static_cast<int>(s.available.size()) != num_alts) {
        throw DataError("individual " + ind.id + " has a bad availability mask");
      }
      if (s.num_available() < 2) {
        throw DataError("individual " + ind.id + " has a situation with fewer than two available alternatives");
      }
      if (s.chosen < 0 || s.chosen >= num_alts || !s.available[s.chosen]) {
        throw DataError("individual " + ind.id + " chose an unavailable alternative");
      }
    }
  }
}

}  // namespace mixl

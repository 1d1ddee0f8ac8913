#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixl {

// How a coefficient enters the utility. Fixed coefficients are shared across
// individuals; the random kinds vary by individual with the stated transform
// of the underlying normal draw.
enum class CoefficientKind {
  Fixed,                    // shared, no transform
  RandomNormal,             // identity transform
  RandomLognormalPositive,  // +exp(b), sign-constrained positive
  RandomLognormalNegative,  // -exp(b), sign-constrained negative
};

bool is_random(CoefficientKind kind);
double transform_one(double b, CoefficientKind kind);
const char* kind_name(CoefficientKind kind);
CoefficientKind kind_from_name(const std::string& name);

// Attribute name that marks an alternative-specific constant (the design
// value is 1 for the alternatives the coefficient applies to).
inline constexpr const char* kConstAttribute = "const";

struct CoefficientSpec {
  std::string name;
  CoefficientKind kind = CoefficientKind::Fixed;
  std::string attribute;              // attribute column or kConstAttribute
  std::vector<std::string> applies_to;  // alternative names; empty = all
};

// Declarative utility layout: which coefficient multiplies which attribute
// for which alternatives. Coefficient order in this list is the canonical
// slot order used by design matrices and weight vectors.
struct UtilitySpec {
  std::vector<std::string> alternatives;
  std::vector<std::string> attributes;
  std::vector<CoefficientSpec> coefficients;

  int num_alternatives() const { return static_cast<int>(alternatives.size()); }
  int num_random() const;
  int num_fixed() const;
  int alternative_index(const std::string& name) const;  // -1 if absent
  int attribute_index(const std::string& name) const;    // -1 if absent
  bool applies(const CoefficientSpec& coef, int alternative) const;

  // Random-kind list in random-slot order (used by transforms).
  std::vector<CoefficientKind> random_kinds() const;
  std::vector<std::string> random_names() const;
  std::vector<std::string> fixed_names() const;

  // Throws SpecError on structural violations: duplicate names, unknown
  // attributes or alternatives, constants that are random or apply to more
  // than one alternative, a constant in every alternative, no coefficients.
  void validate() const;
};

// Stable content hash over the canonical form, used to pair model artifacts
// with the spec they were estimated under.
std::uint64_t spec_hash(const UtilitySpec& spec);
std::string spec_hash_hex(const UtilitySpec& spec);

UtilitySpec load_spec(const std::string& path);
UtilitySpec parse_spec_json(const std::string& text);
void save_spec(const UtilitySpec& spec, const std::string& path);

}  // namespace mixl

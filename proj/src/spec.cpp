#include "mixl/spec.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixl/errors.hpp"

namespace mixl {

using nlohmann::json;

bool is_random(CoefficientKind kind) { return kind != CoefficientKind::Fixed; }

double transform_one(double b, CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::Fixed:
    case CoefficientKind::RandomNormal:
      return b;
    case CoefficientKind::RandomLognormalPositive:
      return std::exp(b);
    case CoefficientKind::RandomLognormalNegative:
      return -std::exp(b);
  }
  return b;
}

const char* kind_name(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::Fixed: return "fixed";
    case CoefficientKind::RandomNormal: return "normal";
    case CoefficientKind::RandomLognormalPositive: return "lognormal_positive";
    case CoefficientKind::RandomLognormalNegative: return "lognormal_negative";
  }
  return "fixed";
}

CoefficientKind kind_from_name(const std::string& name) {
  if (name == "fixed") return CoefficientKind::Fixed;
  if (name == "normal") return CoefficientKind::RandomNormal;
  if (name == "lognormal_positive") return CoefficientKind::RandomLognormalPositive;
  if (name == "lognormal_negative") return CoefficientKind::RandomLognormalNegative;
  throw SpecError("unknown coefficient kind: " + name);
}

int UtilitySpec::num_random() const {
  int n = 0;
  for (const auto& c : coefficients) n += is_random(c.kind) ? 1 : 0;
  return n;
}

int UtilitySpec::num_fixed() const {
  return static_cast<int>(coefficients.size()) - num_random();
}

int UtilitySpec::alternative_index(const std::string& name) const {
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    if (alternatives[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int UtilitySpec::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == name) return static_cast<int>(i);
  }
  return -1;
}

bool UtilitySpec::applies(const CoefficientSpec& coef, int alternative) const {
  if (coef.applies_to.empty()) return true;
  const std::string& name = alternatives[alternative];
  for (const auto& a : coef.applies_to) {
    if (a == name) return true;
  }
  return false;
}

std::vector<CoefficientKind> UtilitySpec::random_kinds() const {
  std::vector<CoefficientKind> kinds;
  for (const auto& c : coefficients) {
    if (is_random(c.kind)) kinds.push_back(c.kind);
  }
  return kinds;
}

std::vector<std::string> UtilitySpec::random_names() const {
  std::vector<std::string> names;
  for (const auto& c : coefficients) {
    if (is_random(c.kind)) names.push_back(c.name);
  }
  return names;
}

std::vector<std::string> UtilitySpec::fixed_names() const {
  std::vector<std::string> names;
  for (const auto& c : coefficients) {
    if (!is_random(c.kind)) names.push_back(c.name);
  }
  return names;
}

void UtilitySpec::validate() const {
  if (alternatives.size() < 2) throw SpecError("spec needs at least two alternatives");
  if (coefficients.empty()) throw SpecError("spec needs at least one coefficient");

  std::set<std::string> seen;
  for (const auto& a : alternatives) {
    if (!seen.insert(a).second) throw SpecError("duplicate alternative: " + a);
  }
  seen.clear();
  for (const auto& a : attributes) {
    if (a == kConstAttribute) throw SpecError("attribute name 'const' is reserved");
    if (!seen.insert(a).second) throw SpecError("duplicate attribute: " + a);
  }
  seen.clear();
  for (const auto& c : coefficients) {
    if (!seen.insert(c.name).second) throw SpecError("duplicate coefficient: " + c.name);
    if (c.attribute == kConstAttribute) {
      if (is_random(c.kind)) {
        throw SpecError("constant " + c.name + " must be a fixed coefficient");
      }
      if (c.applies_to.size() != 1) {
        throw SpecError("constant " + c.name + " must apply to exactly one alternative");
      }
    } else if (attribute_index(c.attribute) < 0) {
      throw SpecError("coefficient " + c.name + " binds unknown attribute " + c.attribute);
    }
    for (const auto& a : c.applies_to) {
      if (alternative_index(a) < 0) {
        throw SpecError("coefficient " + c.name + " names unknown alternative " + a);
      }
    }
  }

  // With a constant in every alternative, utilities are only identified up to
  // a shift. Require at least one constant-free alternative.
  std::vector<bool> has_const(alternatives.size(), false);
  for (const auto& c : coefficients) {
    if (c.attribute != kConstAttribute) continue;
    has_const[alternative_index(c.applies_to[0])] = true;
  }
  bool some_base = false;
  for (bool h : has_const) some_base = some_base || !h;
  if (!some_base) throw SpecError("every alternative has a constant; one must be the base");
}

namespace {

void hash_bytes(std::uint64_t& h, const std::string& s) {
  // FNV-1a, field-separated.
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= 0x1f;
  h *= 1099511628211ULL;
}

}  // namespace

std::uint64_t spec_hash(const UtilitySpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  hash_bytes(h, "alternatives");
  for (const auto& a : spec.alternatives) hash_bytes(h, a);
  hash_bytes(h, "attributes");
  for (const auto& a : spec.attributes) hash_bytes(h, a);
  hash_bytes(h, "coefficients");
  for (const auto& c : spec.coefficients) {
    hash_bytes(h, c.name);
    hash_bytes(h, kind_name(c.kind));
    hash_bytes(h, c.attribute);
    for (const auto& a : c.applies_to) hash_bytes(h, a);
  }
  return h;
}

std::string spec_hash_hex(const UtilitySpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(spec_hash(spec)));
  return buf;
}

UtilitySpec parse_spec_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec is not valid json: ") + e.what());
  }
  UtilitySpec spec;
  try {
    spec.alternatives = j.at("alternatives").get<std::vector<std::string>>();
    spec.attributes = j.value("attributes", std::vector<std::string>{});
    for (const auto& jc : j.at("coefficients")) {
      CoefficientSpec c;
      c.name = jc.at("name").get<std::string>();
      c.kind = kind_from_name(jc.at("kind").get<std::string>());
      c.attribute = jc.at("attribute").get<std::string>();
      c.applies_to = jc.value("alternatives", std::vector<std::string>{});
      spec.coefficients.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec is missing fields: ") + e.what());
  }
  spec.validate();
  return spec;
}

UtilitySpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_json(ss.str());
}

void save_spec(const UtilitySpec& spec, const std::string& path) {
  json j;
  j["alternatives"] = spec.alternatives;
  j["attributes"] = spec.attributes;
  json coefs = json::array();
  for (const auto& c : spec.coefficients) {
    json jc;
    jc["name"] = c.name;
    jc["kind"] = kind_name(c.kind);
    jc["attribute"] = c.attribute;
    if (!c.applies_to.empty()) jc["alternatives"] = c.applies_to;
    coefs.push_back(jc);
  }
  j["coefficients"] = coefs;
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write spec file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mixl

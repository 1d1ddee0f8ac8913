#include <doctest.h>

#include <filesystem>

#include "mixl/data.hpp"
#include "mixl/errors.hpp"
#include "mixl/spec.hpp"

using namespace mixl;

namespace {

UtilitySpec mode_choice_spec() {
  UtilitySpec spec;
  spec.alternatives = {"car", "bus", "walk"};
  spec.attributes = {"cost", "time"};
  spec.coefficients = {
      {"b_cost", CoefficientKind::RandomLognormalNegative, "cost", {}},
      {"b_time", CoefficientKind::RandomNormal, "time", {}},
      {"c_bus", CoefficientKind::Fixed, "const", {"bus"}},
      {"c_walk", CoefficientKind::Fixed, "const", {"walk"}},
  };
  return spec;
}

}  // namespace

TEST_CASE("a well formed spec validates and counts slots") {
  UtilitySpec spec = mode_choice_spec();
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.num_random() == 2);
  CHECK(spec.num_fixed() == 2);
  CHECK(spec.random_names() == std::vector<std::string>{"b_cost", "b_time"});
  CHECK(spec.fixed_names() == std::vector<std::string>{"c_bus", "c_walk"});
  CHECK(spec.alternative_index("walk") == 2);
  CHECK(spec.alternative_index("tram") == -1);
}

TEST_CASE("structural violations throw SpecError") {
  SUBCASE("duplicate coefficient name") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients.push_back({"b_cost", CoefficientKind::Fixed, "time", {}});
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("unknown attribute") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients[0].attribute = "comfort";
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("unknown alternative in applies_to") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients[2].applies_to = {"tram"};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("random constant") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients[2].kind = CoefficientKind::RandomNormal;
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("constant spanning several alternatives") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients[2].applies_to = {"bus", "walk"};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("every alternative carries a constant") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients.push_back({"c_car", CoefficientKind::Fixed, "const", {"car"}});
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("attribute named const is reserved") {
    UtilitySpec spec = mode_choice_spec();
    spec.attributes.push_back("const");
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("no coefficients") {
    UtilitySpec spec = mode_choice_spec();
    spec.coefficients.clear();
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("fewer than two alternatives") {
    UtilitySpec spec = mode_choice_spec();
    spec.alternatives = {"car"};
    spec.coefficients = {{"b_cost", CoefficientKind::RandomNormal, "cost", {}}};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
}

TEST_CASE("kind names round trip") {
  for (CoefficientKind kind :
       {CoefficientKind::Fixed, CoefficientKind::RandomNormal,
        CoefficientKind::RandomLognormalPositive,
        CoefficientKind::RandomLognormalNegative}) {
    CHECK(kind_from_name(kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(kind_from_name("triangular"), SpecError);
}

TEST_CASE("spec json round trips and the content hash is stable") {
  const UtilitySpec spec = mode_choice_spec();
  const auto path = std::filesystem::temp_directory_path() / "mixl_spec_rt.json";
  save_spec(spec, path.string());
  const UtilitySpec back = load_spec(path.string());
  CHECK(spec_hash(back) == spec_hash(spec));
  CHECK(back.alternatives == spec.alternatives);
  CHECK(back.coefficients.size() == spec.coefficients.size());

  // Frozen hash: guards artifact compatibility. If this changes, every saved
  // model artifact stops loading; change it knowingly or not at all.
  CHECK(spec_hash_hex(spec) == "ea8018b9c154fe71");

  // Hash covers content, not formatting.
  UtilitySpec renamed = spec;
  renamed.coefficients[0].name = "b_price";
  CHECK(spec_hash(renamed) != spec_hash(spec));
  UtilitySpec rekinded = spec;
  rekinded.coefficients[1].kind = CoefficientKind::RandomLognormalPositive;
  CHECK(spec_hash(rekinded) != spec_hash(spec));
}

TEST_CASE("dataset validation rejects shape and availability defects") {
  const UtilitySpec spec = mode_choice_spec();
  Dataset ds;
  ds.spec = spec;
  Individual ind;
  ind.id = "i1";
  ind.group = "g1";
  ChoiceSituation sit;
  sit.attributes = Eigen::MatrixXd::Zero(3, 2);
  sit.available = {true, true, true};
  sit.chosen = 1;
  ind.situations.push_back(sit);
  ds.individuals.push_back(ind);
  CHECK_NOTHROW(ds.validate());

  SUBCASE("chosen alternative must be available") {
    ds.individuals[0].situations[0].available[1] = false;
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
  SUBCASE("at least two available alternatives") {
    ds.individuals[0].situations[0].available = {false, true, false};
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
  SUBCASE("attribute matrix shaped alternatives x attributes") {
    ds.individuals[0].situations[0].attributes = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
  SUBCASE("empty panel") {
    ds.individuals[0].situations.clear();
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
  SUBCASE("chosen index in range") {
    ds.individuals[0].situations[0].chosen = 3;
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixl/rng.hpp"

#include "oracles.hpp"

using mixl::RngStream;

TEST_CASE("identical seed and stream reproduce the sequence") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 7);
  RngStream d(42, 7);
  for (int i = 0; i < 200; ++i) {
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("different streams from one seed differ") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1) and centers on one half") {
  RngStream rng(1, 0);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    acc += u;
  }
  const double se = 1.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(acc / n - 0.5) < 4.0 * se);
}

TEST_CASE("uniform_pos never returns zero") {
  RngStream rng(9, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_pos();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
}

TEST_CASE("normal draws pass a KS test against the standard normal") {
  RngStream rng(5, 2);
  std::vector<double> xs(50000);
  for (double& x : xs) x = rng.normal();
  CHECK(oracle::ks_distance_normal(xs) < 0.02);
  CHECK(std::abs(oracle::mean(xs)) < 4.0 / std::sqrt(50000.0));
  CHECK(std::abs(oracle::variance(xs) - 1.0) < 0.03);
}

TEST_CASE("gamma moments match shape/scale for both shape regimes") {
  RngStream rng(11, 0);
  const int n = 200000;
  for (double shape : {0.5, 2.5, 7.0}) {
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.gamma(shape);
    const double se_mean = std::sqrt(shape / n);
    CHECK(std::abs(oracle::mean(xs) - shape) < 4.0 * se_mean);
    CHECK(oracle::variance(xs) == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("chi squared mean and variance") {
  RngStream rng(13, 0);
  const int n = 200000;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.chi_squared(3.0);
  CHECK(std::abs(oracle::mean(xs) - 3.0) < 4.0 * std::sqrt(6.0 / n));
  CHECK(oracle::variance(xs) == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("derived seeds separate by label") {
  const std::uint64_t base = 1234;
  CHECK(mixl::derive_seed(base, 1, 2) != mixl::derive_seed(base, 2, 1));
  CHECK(mixl::derive_seed(base, 1) != mixl::derive_seed(base, 2));
  CHECK(mixl::derive_seed(base, 1, 2) == mixl::derive_seed(base, 1, 2));
}

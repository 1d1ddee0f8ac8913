#include <doctest.h>

#include <Eigen/Dense>

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"
#include "mixl/rng.hpp"

using namespace mixl;

namespace {

Eigen::MatrixXd random_spd(int p, RngStream& rng) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  }
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

TEST_CASE("cholesky_psd matches Eigen LLT on positive definite input") {
  RngStream rng(3, 0);
  for (int p : {1, 2, 5, 9}) {
    const Eigen::MatrixXd a = random_spd(p, rng);
    const Eigen::MatrixXd l = cholesky_psd(a);
    const Eigen::MatrixXd ref = Eigen::LLT<Eigen::MatrixXd>(a).matrixL();
    CHECK((l - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((l * l.transpose() - a).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("cholesky_psd handles semidefinite input") {
  SUBCASE("zero matrix factors to zero") {
    const Eigen::MatrixXd l = cholesky_psd(Eigen::MatrixXd::Zero(3, 3));
    CHECK(l.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("rank one matrix") {
    Eigen::VectorXd v(3);
    v << 1.0, -2.0, 0.5;
    const Eigen::MatrixXd a = v * v.transpose();
    const Eigen::MatrixXd l = cholesky_psd(a);
    CHECK((l * l.transpose() - a).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("indefinite input throws") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS(cholesky_psd(a), NumericalError);
  }
}

TEST_CASE("jittered variant rescues borderline matrices") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  a(1, 1) -= 1e-13;  // a hair indefinite from rounding
  const Eigen::MatrixXd l = cholesky_psd_jittered(a);
  CHECK((l * l.transpose() - a).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("quad_form_chol equals the explicit inverse quadratic form") {
  RngStream rng(4, 0);
  const Eigen::MatrixXd a = random_spd(4, rng);
  const Eigen::MatrixXd l = cholesky_psd(a);
  Eigen::VectorXd d(4);
  for (int i = 0; i < 4; ++i) d[i] = rng.normal();
  const double direct = d.dot(a.inverse() * d);
  CHECK(quad_form_chol(l, d) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("inverse_from_chol inverts") {
  RngStream rng(5, 0);
  const Eigen::MatrixXd a = random_spd(3, rng);
  const Eigen::MatrixXd inv = inverse_from_chol(cholesky_psd(a));
  CHECK((a * inv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("is_symmetric tolerance") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 2.0 + 1e-12, 1.0;
  CHECK(is_symmetric(a, 1e-10));
  CHECK_FALSE(is_symmetric(a, 1e-14));
}

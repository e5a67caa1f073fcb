#include <catch2/catch_amalgamated.hpp>

#include "spinmeter/states.hpp"
#include "test_support.hpp"

using namespace spinmeter;

TEST_CASE("density validation", "[states]") {
  CHECK_NOTHROW(validate_density(maximally_mixed(3)));
  auto gen = testutil::rng(5);
  CHECK_NOTHROW(validate_density(testutil::random_density(4, gen)));
  CHECK_NOTHROW(validate_density(projector(testutil::random_ket(3, gen))));

  CHECK_THROWS_AS(validate_density(1.1 * maximally_mixed(2)), std::invalid_argument);
  CHECK_THROWS_AS(validate_density(Matrix::Zero(2, 3)), std::invalid_argument);
  Matrix skew = maximally_mixed(2);
  skew(0, 1) = Complex(0.3, 0.0);
  CHECK_THROWS_AS(validate_density(skew), std::invalid_argument);
  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.5;
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(validate_density(indefinite), std::invalid_argument);
}

TEST_CASE("fidelity endpoints and symmetry", "[states]") {
  Vector up = Vector::Zero(2), down = Vector::Zero(2);
  up(0) = 1.0;
  down(1) = 1.0;
  CHECK_THAT(state_fidelity(projector(up), projector(up)), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(state_fidelity(projector(up), projector(down)),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(state_fidelity(projector(up), maximally_mixed(2)),
             Catch::Matchers::WithinAbs(0.5, 1e-12));

  auto gen = testutil::rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const Matrix rho = testutil::random_density(3, gen);
    const Matrix sigma = testutil::random_density(3, gen);
    const double f = state_fidelity(rho, sigma);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    CHECK_THAT(f, Catch::Matchers::WithinAbs(state_fidelity(sigma, rho), 1e-10));
    // Pure reference: fidelity reduces to the overlap <psi|rho|psi>.
    const Vector psi = testutil::random_ket(3, gen);
    CHECK_THAT(state_fidelity(projector(psi), rho),
               Catch::Matchers::WithinAbs(expectation(psi, rho).real(), 1e-10));
  }
}

TEST_CASE("trace distance endpoints and the fidelity bounds", "[states]") {
  Vector up = Vector::Zero(2), down = Vector::Zero(2);
  up(0) = 1.0;
  down(1) = 1.0;
  CHECK_THAT(trace_distance(projector(up), projector(down)),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(trace_distance(projector(up), projector(up)), Catch::Matchers::WithinAbs(0.0, 1e-12));

  auto gen = testutil::rng(19);
  for (int trial = 0; trial < 12; ++trial) {
    const Matrix rho = testutil::random_density(4, gen);
    const Matrix sigma = testutil::random_density(4, gen);
    const double t = trace_distance(rho, sigma);
    const double f = state_fidelity(rho, sigma);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0 + 1e-12);
    CHECK(1.0 - std::sqrt(f) <= t + 1e-10);
    CHECK(t <= std::sqrt(1.0 - f) + 1e-10);
  }
}

TEST_CASE("psd square root squares back", "[states]") {
  auto gen = testutil::rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = testutil::random_density(4, gen);
    const Matrix root = psd_sqrt(rho);
    CHECK(testutil::max_abs_diff(root * root, rho) < 1e-12);
    CHECK(min_eigenvalue(root) > -1e-13);
  }
}

TEST_CASE("projector and maximally mixed state", "[states]") {
  auto gen = testutil::rng(29);
  const Vector psi = 3.7 * testutil::random_ket(3, gen);  // unnormalized on purpose
  const Matrix p = projector(psi);
  CHECK_THAT(p.trace().real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(testutil::max_abs_diff(p * p, p) < 1e-12);
  CHECK_THROWS_AS(projector(Vector::Zero(3)), std::invalid_argument);
  CHECK_THAT(maximally_mixed(5).trace().real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(maximally_mixed(0), std::invalid_argument);
}

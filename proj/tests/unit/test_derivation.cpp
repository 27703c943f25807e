#include <cmath>

#include "doctest.h"
#include "ellvne/derivation.hpp"
#include "ellvne/errors.hpp"
#include "ellvne/scenarios.hpp"

using namespace ellvne;

namespace {

double max_value(const CoefficientTable& t) {
  double m = 0.0;
  for (double v : t.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("Case 1 derivation on the known three-dimensional family") {
  const double mu = 2.0;
  const double lambda = 1.0;
  const auto fam = d3_known(0.5, 1.0, 0.0, lambda, mu);
  const auto& s = fam.system;
  const auto der = derive_case1_coefficients(s.a(), s.b(), s.x(), s.theta(), 1.0, EllipticModulus(0.5));
  CHECK(der.family_dimension == 1);
  CHECK(der.relative_residual <= 1e-10);
  CHECK(der.max_forced_zero() <= 1e-10);
  CHECK(der.alpha == doctest::Approx(1.0 / (mu - lambda)).epsilon(1e-10));
  CHECK(der.beta == doctest::Approx(1.0 / (mu + lambda)).epsilon(1e-10));
  CHECK(der.coefficients.at("b_B") == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(der.nu_direction.at("b_B") == doctest::Approx(1.0));
  CHECK(der.nu_direction.at("a_A") == doctest::Approx(1.0));
  CHECK(der.nu_direction.at("x_X") == doctest::Approx(1.0));
  CHECK_THROWS_AS(der.coefficients.at("c_0"), std::out_of_range);

  const auto h = hamiltonian_from_derivation(der, s.a(), s.b(), s.x(), s.theta());
  const auto grid = uniform_grid(0.0, 8.0 * complete_elliptic_K(EllipticModulus(0.5)), 801);
  CHECK(max_vne_residual(analytic_path(s), h, grid) <= 1e-9 * case1_state(s, 0.0).matrix().frobenius_norm());
}

TEST_CASE("Case 1 derivation reproduces the (3b, 4b, 5b) choice") {
  const double b = 1.25;
  const auto var = d3_variation(b, 1.0, 0.0, 0.5);
  const auto& s = var.system;
  const auto der = derive_case1_coefficients(s.a(), s.b(), s.x(), s.theta(), 1.0, EllipticModulus(0.5), 4.0 * b);
  CHECK(der.coefficients.at("a_A") == doctest::Approx(3.0 * b).epsilon(1e-10));
  CHECK(der.coefficients.at("b_B") == doctest::Approx(4.0 * b).epsilon(1e-10));
  CHECK(der.coefficients.at("x_X") == doctest::Approx(5.0 * b).epsilon(1e-10));
  CHECK(der.alpha == doctest::Approx(-1.0 / b).epsilon(1e-10));
  CHECK(der.beta == doctest::Approx(-1.0 / b).epsilon(1e-10));
  CHECK(max_value(der.forced_zeros) <= 1e-10);
}

TEST_CASE("Case 1 derivation rejects a perturbed generator") {
  const auto fam = d3_known(0.5, 1.0, 0.0, 1.0, 2.0);
  const auto& s = fam.system;
  ComplexMatrix x = s.x().matrix();
  x(1, 2) += 1e-3;
  x(2, 1) += 1e-3;
  CHECK_THROWS_AS(derive_case1_coefficients(s.a(), s.b(), HermitianOperator(x), s.theta(), 1.0, EllipticModulus(0.5)),
                  DerivationError);
  CHECK_THROWS_AS(derive_case1_coefficients(s.a(), s.b(), s.x(), pauli(0), 1.0, EllipticModulus(0.5)),
                  DimensionMismatch);
}

TEST_CASE("Case 2 derivation on the two-level pulse") {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto& s = mb.system;
  const auto der = derive_case2_coefficients(s.a(), s.c(), s.d(), s.theta0(), s.t_coeffs(), 1.0, EllipticModulus(1.0));
  CHECK(der.family_dimension == 1);
  CHECK(der.max_forced_zero() <= 1e-10);
  CHECK(der.alpha == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(der.delta == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(der.t_d == doctest::Approx(-1.0));
  // The free direction moves H[theta] by t_D per unit nu.
  CHECK(der.nu_direction.at("d_0") == doctest::Approx(der.t_d).epsilon(1e-10));

  const auto der1 =
      derive_case2_coefficients(s.a(), s.c(), s.d(), s.theta0(), s.t_coeffs(), 1.0, EllipticModulus(1.0), 1.0);
  const auto mb1 = maxwell_bloch(1.0, 1.0, 1.0, 1.0);
  CHECK(der1.coefficients.at("d_0") == doctest::Approx(case2_theta_image_coefficient(mb1.system)).epsilon(1e-10));
  const auto h = hamiltonian_from_derivation(der1, s.a(), s.c(), s.d(), mb1.system.theta());
  CHECK(max_vne_residual(analytic_path(mb1.system), h, uniform_grid(-10.0, 10.0, 401)) <= 1e-9);
}

TEST_CASE("Case 2 derivation on the three-level operators") {
  const auto tl = three_level(0.5, 2.0, 1.0, 0.0, 1.0);
  const auto& s = tl.system;
  const auto der = derive_case2_coefficients(s.a(), s.c(), s.d(), s.theta0(), s.t_coeffs(), 1.0, EllipticModulus(0.5));
  CHECK(der.max_forced_zero() <= 1e-10);
  CHECK(der.alpha == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(der.delta == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("Case 2 derivation with a nonzero t_A") {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto& s = mb.system;
  std::array<double, 3> t = s.t_coeffs();
  t[0] = 0.1;
  bool rejected = false;
  try {
    const auto der = derive_case2_coefficients(s.a(), s.c(), s.d(), s.theta0(), t, 1.0, EllipticModulus(1.0));
    CHECK(der.forced_zeros.at("t_A") == doctest::Approx(0.1));
  } catch (const DerivationError&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("solve_operator_equations reports inconsistency without throwing") {
  // i[s1, H[s1]] = s3 with H[s1] in span{s1}: no solution.
  std::vector<OperatorEquation> eqs{{"bad", {{1.0, pauli(1).matrix(), 0}}, pauli(3).matrix()}};
  const auto sol = solve_operator_equations(eqs, 1, {pauli(1).matrix()});
  CHECK(sol.relative_residual > 0.5);
}

#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "ellvne/dynamics.hpp"
#include "ellvne/errors.hpp"
#include "ellvne/scenarios.hpp"

using namespace ellvne;

namespace {

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return frobenius_distance(a, b); }

}  // namespace

TEST_CASE("Bloch helpers") {
  const auto half = bloch_decompose(0.5 * pauli(0));
  CHECK(half.norm() == 0.0);
  const BlochVector u{0.3, -0.4, 0.5};
  const auto back = bloch_decompose(bloch_compose(u));
  CHECK(std::abs(back.u1 - u.u1) <= 1e-13);
  CHECK(std::abs(back.u2 - u.u2) <= 1e-13);
  CHECK(std::abs(back.u3 - u.u3) <= 1e-13);
  CHECK_THROWS_AS(bloch_decompose(pauli(1)), DomainError);
  CHECK_THROWS_AS(bloch_decompose(HermitianOperator::identity(3)), DimensionMismatch);
}

TEST_CASE("Maxwell-Bloch pulse") {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto u0 = bloch_decompose(case2_state(mb.system, 0.0));
  CHECK(u0.u1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(u0.u2) <= 1e-15);
  CHECK(std::abs(u0.u3) <= 1e-15);
  CHECK(mb.system.alpha() == doctest::Approx(-1.0));
  CHECK(mb.system.delta() == doctest::Approx(-1.0));

  for (double tau : {0.5, 1.0, 2.0}) {
    for (double dl : {0.5, 1.0, 3.0}) {
      for (double kappa : {1.0, 2.5}) {
        const auto m = maxwell_bloch(tau, dl, kappa);
        for (double t : uniform_grid(-10.0 * tau, 10.0 * tau, 81)) {
          CHECK(std::abs(bloch_decompose(case2_state(m.system, t)).norm() - 1.0) <= 1e-12);
          CHECK(maxwell_bloch_equation_defect(m, t) <= 1e-9);
        }
        CHECK(m.field(0.0) == doctest::Approx(2.0 / (kappa * tau)));
      }
    }
  }
  CHECK_THROWS_AS(maxwell_bloch(0.0, 1.0), DomainError);
}

TEST_CASE("Maxwell-Bloch: quoted identity image fails the equation") {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto grid = uniform_grid(-10.0, 10.0, 401);
  CHECK(max_vne_residual(analytic_path(mb.system), mb.map, grid) <= 1e-10);
  const auto quoted = maxwell_bloch_quoted_map(mb);
  CHECK(max_vne_residual(analytic_path(mb.system), quoted, grid) > 1e-3);
  // The two maps agree on the traceless part.
  for (int a = 1; a <= 3; ++a) CHECK(dist(quoted.apply(pauli(a)), mb.map.apply(pauli(a))) <= 1e-12);
}

TEST_CASE("phase modulation") {
  const double tau = 1.5;
  const double chirp = 0.8;
  const auto pm = phase_modulation(tau, chirp);
  const double r = std::sqrt(1.0 + tau * tau * chirp * chirp);
  const auto u0 = bloch_decompose(case1_state(pm.system, 0.0));
  CHECK(u0.u1 == doctest::Approx(-tau * chirp / r).epsilon(1e-14));
  CHECK(u0.u2 == doctest::Approx(-1.0 / r).epsilon(1e-14));
  CHECK(std::abs(u0.u3) <= 1e-15);
  CHECK(u0.u1 == doctest::Approx(tau * chirp * u0.u2));
  CHECK(pm.system.alpha() + pm.system.beta() != 0.0);
  for (double t : uniform_grid(-15.0, 15.0, 121)) {
    const auto u = bloch_decompose(case1_state(pm.system, t));
    CHECK(u.u3 == doctest::Approx(std::tanh(t / tau)).epsilon(1e-13));
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    CHECK(phase_modulation_equation_defect(pm, t) <= 1e-10);
  }
  CHECK(max_vne_residual(analytic_path(pm.system), pm.map, uniform_grid(-10.0, 10.0, 201)) <= 1e-10);
  CHECK(pm.map.apply(pauli(0)).max_abs() <= 1e-12);
  CHECK_THROWS_AS(phase_modulation(1.0, 0.0), DomainError);
}

TEST_CASE("three-level system") {
  const auto tl = three_level(0.5, 2.0, 1.0, 0.0, 1.0, 2.0);
  CHECK(tl.lambda_quoted == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(tl.epsilon_quoted == doctest::Approx(0.5 * 2.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(tl.lambda) == doctest::Approx(std::abs(tl.lambda_quoted)).epsilon(1e-12));
  CHECK(std::abs(tl.epsilon) == doctest::Approx(2.0 * tl.epsilon_quoted).epsilon(1e-12));
  CHECK_THROWS_AS(three_level(0.5, -2.0, 1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(three_level(0.0, 2.0, 1.0, 0.0, 1.0), DomainError);

  for (double phi : {0.0, std::numbers::pi / 3.0}) {
    CAPTURE(phi);
    const double mu = 1.3;
    const auto s = three_level(0.6, 2.0, 1.0, phi, mu);
    const auto grid = uniform_grid(0.0, 4.0 * complete_elliptic_K(EllipticModulus(0.6)), 121);
    const std::function<ComplexMatrix(double)> h_sigma = [&s](double t) {
      return s.h0_block.matrix() + s.interaction(t);
    };
    double worst = 0.0;
    double worst_quoted = 0.0;
    for (double t : grid) {
      const ComplexMatrix sig = s.sigma.state(t);
      const ComplexMatrix rhs = Complex(0.0, -1.0) * commutator(h_sigma(t), sig);
      worst = std::max(worst, dist(s.sigma.derivative(t), rhs));
      const ComplexMatrix hq = s.h0_block.matrix() + s.interaction_quoted(t);
      worst_quoted = std::max(worst_quoted, dist(s.sigma.derivative(t), Complex(0.0, -1.0) * commutator(hq, sig)));
      // The interaction is the pulse on the (1,3), (2,3) pattern.
      const ComplexMatrix hi = s.interaction(t);
      CHECK(std::abs(hi(0, 1)) <= 1e-12);
      CHECK(std::abs(hi(0, 0)) <= 1e-12);
      CHECK(std::abs(hi(2, 2)) <= 1e-12);
      CHECK(std::abs(hi(0, 2) - hi(1, 2)) <= 1e-12);
      const Complex p = s.pulse(t);
      CHECK(std::abs(std::abs(hi(0, 2)) - std::abs(s.epsilon * p)) <= 1e-12);
    }
    CHECK(worst <= 1e-9);
    CHECK(worst_quoted > 1e-3);
  }
}

TEST_CASE("d3 families") {
  const auto fam = d3_known(0.5, 1.0, 0.0, 1.0, 2.0);
  CHECK(fam.system.alpha() == doctest::Approx(1.0));
  CHECK(fam.system.beta() == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(d3_known(0.5, 1.0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(d3_known(1.5, 1.0, 0.0, 1.0, 2.0), DomainError);

  const auto var = d3_variation(2.0, 1.0, 0.0, 0.5);
  const double a = var.system.alpha();
  CHECK(a == doctest::Approx(-0.5));
  CHECK(var.system.beta() == doctest::Approx(-0.5));
  CHECK(dist(commutator_i(var.system.a(), var.system.x()), Complex(-a / 2.0) * var.system.b().matrix()) <= 1e-12);
  CHECK(dist(var.map.apply(var.system.a()), Complex(var.system.nu() - 2.0) * var.system.a().matrix()) <= 1e-12);
  CHECK_THROWS_AS(d3_variation(0.0, 1.0, 0.0, 0.5), DomainError);

  // k = 1: the solution relaxes to theta + B as t grows, with a sech-shaped transient.
  const auto one = d3_known(1.0, 1.0, 0.2, 0.5, 2.0);
  CHECK(dist(case1_state(one.system, 40.0), one.system.theta() + one.system.b()) <= 1e-12);
  CHECK(dist(case1_state(one.system, -40.0), one.system.theta() - one.system.b()) <= 1e-12);
  for (double phi : {0.0, std::numbers::pi / 3.0}) {
    const auto f = d3_variation(1.0, 1.0, phi, 1.0);
    CHECK(euler_top_residual(f.rho, f.h0, uniform_grid(-10.0, 10.0, 201)) <= 1e-9);
  }
}

TEST_CASE("scenario registry") {
  CHECK(all_scenarios().size() == 5);
  for (const auto kind : all_scenarios()) {
    CHECK(scenario_kind_from_string(to_string(kind)) == kind);
    const auto defaults = default_parameters(kind);
    for (const auto& name : scenario_parameter_names(kind)) CHECK(defaults.count(name) == 1);
  }
  CHECK_THROWS_AS(scenario_kind_from_string("nope"), DomainError);
  CHECK_THROWS_AS(ScenarioSpec::with_defaults(ScenarioKind::MaxwellBloch, {{"mu", 1.0}}), DomainError);
  CHECK(ScenarioSpec::with_defaults(ScenarioKind::D3Variation, {{"b", 2.0}}).get("nu") == 8.0);
  CHECK(ScenarioSpec::with_defaults(ScenarioKind::D3Variation, {{"b", 2.0}, {"nu", 1.0}}).get("nu") == 1.0);
}

TEST_CASE("every scenario satisfies its invariants") {
  for (const auto kind : all_scenarios()) {
    for (double phi : {0.0, std::numbers::pi / 3.0}) {
      std::map<std::string, double> over;
      if (kind == ScenarioKind::ThreeLevel || kind == ScenarioKind::D3Known || kind == ScenarioKind::D3Variation) {
        over["phi"] = phi;
      } else if (phi != 0.0) {
        continue;
      }
      const auto inst = make_scenario(ScenarioSpec::with_defaults(kind, over));
      CAPTURE(to_string(kind));
      CAPTURE(phi);
      const auto [t0, t1] = inst.default_span();
      const auto grid = uniform_grid(t0, t1, 241);
      const double norm0 = inst.path.state(0.0).frobenius_norm();
      CHECK(max_vne_residual(inst.path, inst.map, grid) <= 1e-9 * norm0);

      const auto ev0 = hermitian_spectrum(HermitianOperator(inst.path.state(0.0))).eigenvalues;
      for (double t : grid) {
        const auto ev = hermitian_spectrum(HermitianOperator(inst.path.state(t))).eigenvalues;
        for (std::size_t j = 0; j < ev.size(); ++j) CHECK(std::abs(ev[j] - ev0[j]) <= 1e-10);
      }
      if (inst.k().value() < 1.0) {
        CHECK(std::isfinite(inst.period()));
        CHECK(dist(inst.path.state(inst.period()), inst.path.state(0.0)) <= 1e-9);
      } else {
        CHECK(inst.period() == std::numeric_limits<double>::infinity());
      }
      if (inst.gauge) {
        const auto& g = *inst.gauge;
        CHECK(max_vne_residual(g.rho_path, g.rho_map, grid) <= 1e-9 * norm0);
        CHECK(max_vne_residual(g.sigma_path, g.sigma_map, grid) <= 1e-9 * norm0);
        const auto res = gauge_forward(g.transform, g.rho_map, g.rho_path, grid);
        CHECK(res.covariance_defect <= kCovarianceTol);
      }
      if (inst.euler_top_h0) CHECK(euler_top_residual(inst.gauge->rho_path, *inst.euler_top_h0, grid) <= 1e-9);
    }
  }
}

TEST_CASE("scenario metadata") {
  const auto mb = make_scenario(ScenarioSpec::with_defaults(ScenarioKind::MaxwellBloch));
  CHECK(mb.metadata.at("identity_image_sigma3") == doctest::Approx(1.0));
  CHECK(mb.metadata.at("identity_image_sigma3_quoted") == doctest::Approx(-1.0));
  CHECK(mb.metadata.at("t_D") == doctest::Approx(-1.0));
  const auto tl = make_scenario(ScenarioSpec::with_defaults(ScenarioKind::ThreeLevel));
  CHECK(tl.metadata.count("lambda_quoted") == 1);
  CHECK(tl.dim() == 3);
  CHECK(tl.tag == CaseTag::Case2);
}

// Acceptance criteria runner: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ellvne/derivation.hpp"
#include "ellvne/dynamics.hpp"
#include "ellvne/elliptic.hpp"
#include "ellvne/scenarios.hpp"
#include "oracles.hpp"

using namespace ellvne;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return frobenius_distance(a, b); }

// Two periods from 0 for k < 1, [-10, 10]/omega for k = 1.
std::vector<double> theorem_grid(const ScenarioInstance& inst, std::size_t n) {
  if (inst.k().value() < 1.0) return uniform_grid(0.0, 2.0 * inst.period(), n);
  const double w = std::abs(inst.omega());
  return uniform_grid(-10.0 / w, 10.0 / w, n);
}

std::vector<ScenarioInstance> scenarios(double nu) {
  std::vector<ScenarioInstance> out;
  for (const auto kind : all_scenarios()) {
    out.push_back(make_scenario(ScenarioSpec::with_defaults(kind, {{"nu", nu}})));
  }
  return out;
}

Outcome criterion1() {
  double worst = 0.0;
  for (double k : {0.0, 0.3, 0.7, 0.9, 1.0}) {
    const EllipticModulus km(k);
    for (double u : uniform_grid(-10.0, 10.0, 2001)) {
      const auto t = jacobi_sncndn(u, km);
      worst = std::max({worst, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0),
                        std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0)});
    }
  }
  return {worst <= 1e-12, "max identity defect " + fmt(worst)};
}

Outcome criterion2() {
  double worst = 0.0;
  for (double k : {0.3, 0.7, 0.95}) {
    const EllipticModulus km(k);
    const auto pts = uniform_grid(0.0, 3.0 * 4.0 * complete_elliptic_K(km), 1201);
    const auto ref = oracle::rk4_jacobi(pts, k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto t = jacobi_sncndn(pts[i], km);
      worst = std::max({worst, std::abs(t.sn - ref[i].sn), std::abs(t.cn - ref[i].cn), std::abs(t.dn - ref[i].dn)});
    }
  }
  return {worst <= 1e-8, "max deviation from RK4 oracle " + fmt(worst)};
}

Outcome criterion3() {
  double worst = 0.0;
  for (double nu : {-1.0, 0.0, 1.0}) {
    for (const auto& inst : scenarios(nu)) {
      const double r = max_vne_residual(inst.path, inst.map, theorem_grid(inst, 801));
      worst = std::max(worst, r / inst.path.state(0.0).frobenius_norm());
    }
  }
  return {worst <= 1e-9, "max relative residual " + fmt(worst)};
}

struct Integrated {
  ScenarioInstance inst;
  Trajectory traj;
};

std::vector<Integrated>& integrated() {
  static std::vector<Integrated> runs = [] {
    std::vector<Integrated> out;
    for (auto& inst : scenarios(0.0)) {
      const auto grid = theorem_grid(inst, 201);
      const double t0 = grid.front() <= 0.0 && grid.back() >= 0.0 ? 0.0 : grid.front();
      Trajectory traj = integrate(HermitianOperator(inst.path.state(t0), 1e-10), t0, MapRhs{inst.map}, grid);
      attach_reference(traj, inst.path.state);
      out.push_back({std::move(inst), std::move(traj)});
    }
    return out;
  }();
  return runs;
}

Outcome criterion4() {
  double worst = 0.0;
  for (const auto& run : integrated()) worst = std::max(worst, conservation_report(run.traj).max_residual.value_or(INFINITY));
  return {worst <= 1e-6, "max deviation from analytic state " + fmt(worst)};
}

Outcome criterion5() {
  double drift = 0.0;
  double mb_set = 0.0;
  for (const auto& run : integrated()) {
    drift = std::max(drift, conservation_report(run.traj).max_eigenvalue_drift);
    if (run.inst.spec.kind == ScenarioKind::MaxwellBloch) {
      for (const auto& d : run.traj.diagnostics) {
        mb_set = std::max({mb_set, std::abs(d.spectrum[0]), std::abs(d.spectrum[1] - 1.0)});
      }
    }
  }
  return {drift <= 1e-8 && mb_set <= 1e-8, "eigenvalue drift " + fmt(drift) + ", Maxwell-Bloch {0,1} defect " + fmt(mb_set)};
}

Outcome criterion6() {
  bool identity = true;
  double unitarity = 0.0;
  double recon = 0.0;
  for (const auto& inst : scenarios(0.0)) {
    auto grid = theorem_grid(inst, 101);
    const double t0 = grid.front() <= 0.0 && grid.back() >= 0.0 ? 0.0 : grid.front();
    if (std::find(grid.begin(), grid.end(), t0) == grid.end()) grid.insert(grid.begin(), t0);
    const auto prop = integrate_propagator(inst.path.state, inst.map, t0, grid);
    const ComplexMatrix r0 = inst.path.state(t0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const ComplexMatrix& u = prop.unitaries[i];
      if (grid[i] == t0) identity = identity && dist(u, ComplexMatrix::identity(inst.dim())) == 0.0;
      unitarity = std::max(unitarity, prop.unitarity_defect[i]);
      recon = std::max(recon, dist(u.adjoint() * r0 * u, inst.path.state(grid[i])));
    }
  }
  return {identity && unitarity <= 1e-8 && recon <= 1e-6,
          std::string("U_0 = I ") + (identity ? "exact" : "violated") + ", unitarity " + fmt(unitarity) +
              ", reconstruction " + fmt(recon)};
}

Outcome criterion7() {
  const auto tl = three_level(0.5, 2.0, 1.0, 0.0, 1.0);
  const double p = 4.0 * complete_elliptic_K(EllipticModulus(0.5));
  double tl_res = 0.0;
  for (double t : uniform_grid(0.0, 2.0 * p, 801)) {
    const ComplexMatrix sig = tl.sigma.state(t);
    const ComplexMatrix h = tl.h0_block.matrix() + tl.interaction(t);
    tl_res = std::max(tl_res, dist(tl.sigma.derivative(t), Complex(0.0, -1.0) * commutator(h, sig)));
  }
  const auto known = d3_known(0.5, 1.0, 0.0, 1.0, 2.0);
  const double known_res = euler_top_residual(known.rho, known.h0, uniform_grid(0.0, 2.0 * p, 801));
  const auto var = d3_variation(1.0, 1.0, 0.0, 0.5);
  const double var_res = euler_top_residual(var.rho, var.h0, uniform_grid(0.0, 2.0 * p, 801));
  const double worst = std::max({tl_res, known_res, var_res});
  return {worst <= 1e-9, "three-level " + fmt(tl_res) + ", d3_known Euler top " + fmt(known_res) +
                             ", d3_variation Euler top " + fmt(var_res)};
}

Outcome criterion8() {
  const double mu = 2.0;
  const double lambda = 1.0;
  const double omega = 1.0;
  const auto fam = d3_known(0.5, omega, 0.0, lambda, mu);
  const auto& s = fam.system;
  const auto d1 = derive_case1_coefficients(s.a(), s.b(), s.x(), s.theta(), omega, EllipticModulus(0.5));
  const double e1 = std::max(std::abs(d1.alpha - omega / (mu - lambda)), std::abs(d1.beta - omega / (mu + lambda)));

  const double td = 1.0;
  const auto mb = maxwell_bloch(1.0, td);
  const auto& m = mb.system;
  const auto d2 = derive_case2_coefficients(m.a(), m.c(), m.d(), m.theta0(), m.t_coeffs(), m.omega(), m.k());
  const double alpha_closed = -2.0 / (td * (1.0 + td * td));
  const double delta_closed = -2.0 * td / (1.0 + td * td);
  const double e2 = std::max(std::abs(d2.alpha - alpha_closed), std::abs(d2.delta - delta_closed));
  const bool ok = d1.max_forced_zero() <= 1e-10 && e1 <= 1e-10 && d2.max_forced_zero() <= 1e-10 && e2 <= 1e-10;
  return {ok, "case 1 forced zeros " + fmt(d1.max_forced_zero()) + ", (alpha,beta) error " + fmt(e1) +
                  "; case 2 forced zeros " + fmt(d2.max_forced_zero()) + ", (alpha,delta) error " + fmt(e2)};
}

Outcome criterion9() {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto c2 = fit_case2_constants(mb.system.a(), mb.system.c(), mb.system.d(), EllipticModulus(1.0));
  const double e2 = std::max(std::abs(c2.alpha + 1.0), std::abs(c2.delta() + 1.0));
  double e1 = 0.0;
  for (double b : {0.5, 2.0}) {
    for (double omega : {1.0, 1.7}) {
      const auto var = d3_variation(b, omega, 0.0, 0.5);
      const auto c1 = fit_case1_constants(var.system.a(), var.system.b(), var.system.x(), EllipticModulus(0.5));
      e1 = std::max({e1, std::abs(c1.alpha + omega / b), std::abs(c1.beta() + omega / b)});
    }
  }
  return {e1 <= 1e-12 && e2 <= 1e-12, "Maxwell-Bloch (alpha,delta) error " + fmt(e2) + ", alpha=beta=-omega/b error " + fmt(e1)};
}

Outcome criterion10() {
  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto grid = uniform_grid(-10.0, 10.0, 801);
  const double theorem = max_vne_residual(analytic_path(mb.system), mb.map, grid);
  const double quoted = max_vne_residual(analytic_path(mb.system), maxwell_bloch_quoted_map(mb), grid);
  const bool exactly_one = (theorem <= 1e-9) != (quoted <= 1e-9);
  return {theorem <= 1e-9 && exactly_one,
          "theorem map residual " + fmt(theorem) + ", quoted H[I] residual " + fmt(quoted)};
}

Outcome criterion11() {
  double mbw = 0.0;
  for (const auto& [tau, dl] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto mb = maxwell_bloch(tau, dl);
    for (double t : uniform_grid(-10.0 * tau, 10.0 * tau, 801)) mbw = std::max(mbw, maxwell_bloch_equation_defect(mb, t));
  }
  double pmw = 0.0;
  const auto pm = phase_modulation(1.0, 0.5);
  for (double t : uniform_grid(-10.0, 10.0, 801)) pmw = std::max(pmw, phase_modulation_equation_defect(pm, t));
  return {mbw <= 1e-9 && pmw <= 1e-10, "Maxwell-Bloch defect " + fmt(mbw) + ", phase-modulation defect " + fmt(pmw)};
}

Outcome criterion12() {
  double worst = 0.0;
  for (double k : {0.3, 0.7}) {
    const double omega = 1.3;
    const double p = 4.0 * complete_elliptic_K(EllipticModulus(k)) / omega;
    const auto c1 = d3_variation(1.0, omega, 0.2, k);
    const auto c2 = three_level(k, 2.0, 1.0, 0.2, 1.0, omega);
    for (double t : uniform_grid(-p, 2.0 * p, 301)) {
      worst = std::max(worst, (case1_state(c1.system, t + p).matrix() - case1_state(c1.system, t).matrix()).max_abs());
      worst = std::max(worst, (case2_state(c2.system, t + p).matrix() - case2_state(c2.system, t).matrix()).max_abs());
    }
  }
  return {worst <= 1e-9, "max entrywise period defect " + fmt(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"elliptic identities", criterion1},
      {"elliptic oracle equivalence", criterion2},
      {"theorem residual", criterion3},
      {"integration fidelity", criterion4},
      {"spectrum conservation", criterion5},
      {"propagator", criterion6},
      {"gauge equivalence", criterion7},
      {"coefficient re-derivation", criterion8},
      {"structure-constant closed forms", criterion9},
      {"H[I] arbitration", criterion10},
      {"reduced Bloch systems", criterion11},
      {"periodicity", criterion12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}

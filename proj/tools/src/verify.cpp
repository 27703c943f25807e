#include "ellvne/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellvne/derivation.hpp"
#include "ellvne/errors.hpp"
#include "json.hpp"

namespace ellvne::cli {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void VerificationReport::add(std::string name, double defect, double tolerance, std::string detail) {
  checks.push_back(CheckResult{std::move(name), defect, tolerance, defect <= tolerance, std::move(detail)});
}

void VerificationReport::add_failure(std::string name, std::string detail, double defect, double tolerance) {
  checks.push_back(CheckResult{std::move(name), defect, tolerance, false, std::move(detail)});
}

std::string to_json(const VerificationReport& report, int indent) {
  nlohmann::json j;
  j["subject"] = report.subject;
  j["overall"] = report.passed() ? "pass" : "fail";
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json e{{"name", c.name}, {"tolerance", c.tolerance}, {"passed", c.passed}};
    e["max_defect"] = std::isfinite(c.max_defect) ? nlohmann::json(c.max_defect) : nlohmann::json(nullptr);
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j.dump(indent);
}

int infer_case(const OperatorFile& file) {
  if (file.case_number) return *file.case_number;
  return (file.has("C") || file.has("D") || file.has("theta0")) ? 2 : 1;
}

namespace {

constexpr double kTheoremTol = 1e-9;
constexpr double kFidelityTol = 1e-6;
constexpr double kSpectrumTol = 1e-8;
constexpr double kUnitarityTol = 1e-8;
constexpr double kPeriodicityTol = 1e-9;
constexpr double kSigmaResidualTol = 1e-8;
constexpr double kDerivationMatchTol = 1e-10;

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_image_gap(const OperatorMap& lhs, const OperatorMap& rhs, const std::vector<HermitianOperator>& gens) {
  double worst = 0.0;
  for (const auto& g : gens) {
    const double n = g.matrix().frobenius_norm();
    if (n == 0.0) continue;
    worst = std::max(worst, frobenius_distance(lhs.apply(g), rhs.apply(g)) / n);
  }
  return worst;
}

void add_case1_derivation(VerificationReport& rep, const Case1System& sys, const OperatorMap& map) {
  try {
    const auto der =
        derive_case1_coefficients(sys.a(), sys.b(), sys.x(), sys.theta(), sys.omega(), sys.k(), sys.nu());
    rep.add("derivation.forced_zeros", der.max_forced_zero(), kDerivationMatchTol);
    rep.add("derivation.alpha", relative_gap(der.alpha, sys.alpha()), kDerivationMatchTol);
    rep.add("derivation.beta", relative_gap(der.beta, sys.beta()), kDerivationMatchTol);
    const OperatorMap derived = hamiltonian_from_derivation(der, sys.a(), sys.b(), sys.x(), sys.theta());
    rep.add("derivation.hamiltonian_match", max_image_gap(derived, map, {sys.theta(), sys.a(), sys.b(), sys.x()}),
            1e-9);
  } catch (const DerivationError& e) {
    rep.add_failure("derivation", e.what(), e.residual(), kDerivationMatchTol);
  }
}

void add_case2_derivation(VerificationReport& rep, const Case2System& sys, const OperatorMap& map) {
  try {
    const auto der = derive_case2_coefficients(sys.a(), sys.c(), sys.d(), sys.theta0(), sys.t_coeffs(),
                                               sys.omega(), sys.k(), sys.nu());
    rep.add("derivation.forced_zeros", der.max_forced_zero(), kDerivationMatchTol);
    rep.add("derivation.alpha", relative_gap(der.alpha, sys.alpha()), kDerivationMatchTol);
    rep.add("derivation.delta", relative_gap(der.delta, sys.delta()), kDerivationMatchTol);
    rep.add("derivation.t_D", relative_gap(der.t_d, sys.t_coeffs()[2]), kDerivationMatchTol);
    const OperatorMap derived = hamiltonian_from_derivation(der, sys.a(), sys.c(), sys.d(), sys.theta());
    rep.add("derivation.hamiltonian_match", max_image_gap(derived, map, {sys.theta(), sys.a(), sys.c(), sys.d()}),
            1e-9);
  } catch (const DerivationError& e) {
    rep.add_failure("derivation", e.what(), e.residual(), kDerivationMatchTol);
  }
}

std::vector<double> with_origin(std::vector<double> grid, double t0) {
  if (std::find(grid.begin(), grid.end(), t0) == grid.end()) grid.push_back(t0);
  std::sort(grid.begin(), grid.end());
  return grid;
}

std::pair<double, double> theorem_span(EllipticModulus k, double omega) {
  if (k.value() >= 1.0) return {-10.0 / std::abs(omega), 10.0 / std::abs(omega)};
  return {0.0, 2.0 * 4.0 * complete_elliptic_K(k) / std::abs(omega)};
}

}  // namespace

VerificationReport verify_scenario(const ScenarioInstance& inst, const VerifySettings& settings) {
  VerificationReport rep;
  rep.subject = to_string(inst.spec.kind);
  const auto [t_lo, t_hi] = settings.span.value_or(inst.default_span());
  const double t0 = (t_lo <= 0.0 && 0.0 <= t_hi) ? 0.0 : t_lo;
  const std::vector<double> grid = with_origin(uniform_grid(t_lo, t_hi, std::max<std::size_t>(settings.samples, 2)), t0);

  const auto& c = std::visit([](const auto& s) -> const StructureConstants& { return s.constants(); }, inst.system);
  rep.add("closure", c.fit_residual, kExactTol);

  const double rho0_norm = inst.path.state(0.0).frobenius_norm();
  const auto [th_lo, th_hi] = theorem_span(inst.k(), inst.omega());
  rep.add("theorem_residual", max_vne_residual(inst.path, inst.map, uniform_grid(th_lo, th_hi, 801)),
          kTheoremTol * rho0_norm);

  const HermitianOperator rho_t0(inst.path.state(t0), 1e-10);
  Trajectory traj = integrate(rho_t0, t0, MapRhs{inst.map}, grid, settings.control);
  attach_reference(traj, inst.path.state);
  const auto cons = conservation_report(traj);
  rep.add("integration_fidelity", cons.max_residual.value_or(0.0), kFidelityTol);
  rep.add("spectrum_conservation", cons.max_eigenvalue_drift, kSpectrumTol);
  rep.add("trace_conservation", cons.max_trace_drift, 1e-10 * std::max(1.0, t_hi - t_lo));
  rep.add("hermiticity", cons.max_hermiticity_defect, 1e-9);

  if (inst.k().value() < 1.0) {
    const double period = inst.period();
    double analytic = 0.0;
    for (const double t : uniform_grid(0.0, period, 64)) {
      analytic = std::max(analytic, frobenius_distance(inst.path.state(t + period), inst.path.state(t)));
    }
    rep.add("periodicity.analytic", analytic, kPeriodicityTol);
    const std::vector<double> end{period};
    const HermitianOperator rho0(inst.path.state(0.0), 1e-10);
    const auto back = integrate_matrix_ode(
        [&](double, const ComplexMatrix& y) { return vne_rhs(y, inst.map); }, rho0.matrix(), 0.0, end,
        settings.control);
    rep.add("periodicity.integrated", frobenius_distance(back.front(), rho0.matrix()), kFidelityTol);
  }

  if (inst.gauge) {
    const GaugePair& gp = *inst.gauge;
    try {
      const GaugeResult gr = gauge_forward(gp.transform, gp.rho_map, gp.rho_path, grid);
      rep.add("gauge.covariance", gr.covariance_defect, kCovarianceTol);
      rep.add("gauge.sigma_residual", gr.residual.value_or(0.0), kSigmaResidualTol);
      rep.add("gauge.map_match", max_vne_residual(gp.sigma_path, gp.sigma_map, grid), kTheoremTol);
    } catch (const GaugeError& e) {
      rep.add_failure("gauge.covariance", e.what(), e.max_defect(), kCovarianceTol);
    }
    if (inst.euler_top_h0) {
      rep.add("gauge.euler_top_residual", euler_top_residual(gp.rho_path, *inst.euler_top_h0, grid), kTheoremTol);
    }
    const Trajectory rho_traj =
        integrate(HermitianOperator(gp.rho_path.state(t0), 1e-10), t0, MapRhs{gp.rho_map}, grid, settings.control);
    const Trajectory sigma_traj = integrate(HermitianOperator(gp.sigma_path.state(t0), 1e-10), t0,
                                            MapRhs{gp.sigma_map}, grid, settings.control);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      gap = std::max(gap, frobenius_distance(gauge_undo(gp.transform, sigma_traj.states[i], grid[i]),
                                             rho_traj.states[i]));
    }
    rep.add("gauge.equivalence", gap, kFidelityTol);
  }

  const Propagator prop = integrate_propagator(inst.path.state, inst.map, t0, grid, settings.control);
  double unitarity = 0.0;
  double reconstruction = 0.0;
  double origin = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ComplexMatrix& u = prop.unitaries[i];
    unitarity = std::max(unitarity, prop.unitarity_defect[i]);
    reconstruction = std::max(
        reconstruction, frobenius_distance(u.adjoint() * rho_t0.matrix() * u, inst.path.state(grid[i])));
    if (grid[i] == t0) origin = frobenius_distance(u, ComplexMatrix::identity(inst.dim()));
  }
  rep.add("propagator.identity_at_t0", origin, 0.0);
  rep.add("propagator.unitarity", unitarity, kUnitarityTol);
  rep.add("propagator.reconstruction", reconstruction, kFidelityTol);

  if (const auto* s1 = std::get_if<Case1System>(&inst.system)) add_case1_derivation(rep, *s1, inst.map);
  if (const auto* s2 = std::get_if<Case2System>(&inst.system)) add_case2_derivation(rep, *s2, inst.map);
  return rep;
}

VerificationReport verify_operator_file(const OperatorFile& file, double omega, double k, double nu,
                                        int case_number, const VerifySettings& settings) {
  (void)settings;
  VerificationReport rep;
  rep.subject = "operator file (case " + std::to_string(case_number) + ")";
  const EllipticModulus km(k);
  try {
    if (case_number == 1) {
      const auto theta =
          file.has("theta") ? HermitianOperator(file.at("theta")) : HermitianOperator::zero(file.dim);
      const auto sys = Case1System::create(theta, HermitianOperator(file.at("A")), HermitianOperator(file.at("B")),
                                           HermitianOperator(file.at("X")), omega, km, nu);
      rep.add("closure", sys.constants().fit_residual, kClosureTol);
      const OperatorMap map = case1_hamiltonian(sys);
      const auto [lo, hi] = theorem_span(km, omega);
      rep.add("theorem_residual", max_vne_residual(analytic_path(sys), map, uniform_grid(lo, hi, 801)),
              kTheoremTol * std::max(1.0, case1_state(sys, 0.0).matrix().frobenius_norm()));
      add_case1_derivation(rep, sys, map);
    } else {
      const auto theta0 =
          file.has("theta0") ? HermitianOperator(file.at("theta0")) : HermitianOperator::zero(file.dim);
      const HermitianOperator a(file.at("A"));
      const HermitianOperator c(file.at("C"));
      const HermitianOperator d(file.at("D"));
      const auto sys = file.has("theta")
                           ? Case2System::from_theta(HermitianOperator(file.at("theta")), theta0, a, c, d, omega, km, nu)
                           : Case2System::create(theta0, a, c, d, omega, km, nu);
      rep.add("closure", sys.constants().fit_residual, kClosureTol);
      const OperatorMap map = case2_hamiltonian(sys);
      const auto [lo, hi] = theorem_span(km, omega);
      rep.add("theorem_residual", max_vne_residual(analytic_path(sys), map, uniform_grid(lo, hi, 801)),
              kTheoremTol * std::max(1.0, case2_state(sys, 0.0).matrix().frobenius_norm()));
      add_case2_derivation(rep, sys, map);
    }
  } catch (const ClosureError& e) {
    rep.add_failure("closure: " + e.relation(), e.what(), e.residual(), kClosureTol);
  } catch (const DegenerateConstantsError& e) {
    rep.add_failure("structure_constants", e.what());
  } catch (const LinearDependenceError& e) {
    rep.add_failure("independence", e.what());
  }
  return rep;
}

}  // namespace ellvne::cli

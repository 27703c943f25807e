#include "ellvne/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ellvne/errors.hpp"

namespace ellvne {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void require_finite(std::initializer_list<double> values) {
  for (const double v : values) require(std::isfinite(v), "scenario parameters must be finite");
}

HermitianOperator scaled_identity(std::size_t d, double s) {
  return s * HermitianOperator::identity(d);
}

// s * (e^{i phi} E_ij + e^{-i phi} E_ji)
ComplexMatrix phased_pair(std::size_t d, std::size_t i, std::size_t j, Complex phase) {
  ComplexMatrix m(d);
  m(i, j) = phase;
  m(j, i) = std::conj(phase);
  return m;
}

// Zero-diagonal Hadamard coefficients h_i + h_j.
OperatorMap off_diagonal_sum_map(const std::vector<double>& h) {
  const std::size_t d = h.size();
  ComplexMatrix c(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) c(i, j) = h[i] + h[j];
    }
  }
  return entrywise_map(c);
}

OperatorMap euler_top_closed_form(const HermitianOperator& h0) {
  return anticommutator_map(h0) - Complex(2.0 / 3.0) * trace_map(h0);
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(u1 * u1 + u2 * u2 + u3 * u3); }

BlochVector bloch_components(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw DimensionMismatch("Bloch components need a 2 x 2 matrix");
  BlochVector u;
  u.u1 = frobenius_inner(pauli(1), m).real();
  u.u2 = frobenius_inner(pauli(2), m).real();
  u.u3 = frobenius_inner(pauli(3), m).real();
  return u;
}

BlochVector bloch_decompose(const HermitianOperator& rho) {
  if (rho.dim() != 2) throw DimensionMismatch("Bloch decomposition needs dim 2");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw DomainError("Bloch decomposition needs unit trace");
  return bloch_components(rho.matrix());
}

HermitianOperator bloch_compose(const BlochVector& u) {
  require_finite({u.u1, u.u2, u.u3});
  return 0.5 * (HermitianOperator::identity(2) + u.u1 * pauli(1) + u.u2 * pauli(2) + u.u3 * pauli(3));
}

MaxwellBloch maxwell_bloch(double tau, double detuning, double kappa, double nu) {
  require_finite({tau, detuning, kappa, nu});
  require(tau != 0.0, "maxwell_bloch: tau must be nonzero");
  require(kappa > 0.0, "maxwell_bloch: kappa must be positive");
  const double td = tau * detuning;
  const double s = 1.0 + td * td;
  auto sys = Case2System::create(scaled_identity(2, 0.5), (td / s) * pauli(1), (1.0 / s) * pauli(2),
                                 (1.0 / s) * pauli(3), 1.0 / tau, EllipticModulus(1.0), nu);
  OperatorMap map = case2_hamiltonian(sys);
  return MaxwellBloch{std::move(sys), std::move(map), tau, detuning, kappa,
                      [tau, kappa](double t) { return 2.0 / (kappa * tau) * sech(t / tau); }};
}

OperatorMap maxwell_bloch_quoted_map(const MaxwellBloch& mb) {
  const double w = mb.system.omega();
  const double dl = mb.detuning;
  const double w2d2 = w * w + dl * dl;
  std::vector<GeneratorImage> pairs{
      {pauli(1), Complex(-w2d2 / dl) * pauli(1).matrix()},
      {pauli(2), ComplexMatrix(2)},
      {pauli(3), ComplexMatrix(2)},
      {pauli(0), Complex(-2.0 * w * w * w / w2d2) * pauli(3).matrix()},
  };
  return operator_map_from_action(2, pairs);
}

double maxwell_bloch_equation_defect(const MaxwellBloch& mb, double t) {
  const BlochVector u = bloch_components(case2_state(mb.system, t));
  const BlochVector du = bloch_components(case2_state_derivative(mb.system, t));
  const double ke = mb.kappa * mb.field(t);
  const double dl = mb.detuning;
  return std::max({std::abs(du.u1 + dl * u.u2), std::abs(du.u2 - dl * u.u1 - ke * u.u3),
                   std::abs(du.u3 + ke * u.u2)});
}

PhaseModulation phase_modulation(double tau, double chirp, double nu) {
  require_finite({tau, chirp, nu});
  require(tau != 0.0, "phase_modulation: tau must be nonzero");
  require(chirp != 0.0, "phase_modulation: delta must be nonzero");
  const double r = std::sqrt(1.0 + tau * tau * chirp * chirp);
  auto sys = Case1System::create(scaled_identity(2, 0.5), (-0.5 * tau * chirp / r) * pauli(1), 0.5 * pauli(3),
                                 (-0.5 / r) * pauli(2), 1.0 / tau, EllipticModulus(1.0), nu);
  OperatorMap map = case1_hamiltonian(sys);
  return PhaseModulation{std::move(sys), std::move(map), tau, chirp};
}

double phase_modulation_equation_defect(const PhaseModulation& pm, double t) {
  const BlochVector u = bloch_components(case1_state(pm.system, t));
  const BlochVector du = bloch_components(case1_state_derivative(pm.system, t));
  const double it = 1.0 / pm.tau;
  return std::max({std::abs(du.u1 + it * u.u1 * u.u3), std::abs(du.u2 + it * u.u2 * u.u3),
                   std::abs(du.u3 - it * (u.u1 * u.u1 + u.u2 * u.u2))});
}

HermitianOperator level_projector3() {
  const std::array<double, 3> p{0.0, 0.0, 1.0};
  return HermitianOperator(ComplexMatrix::diagonal(p));
}

ThreeLevel three_level(double k, double alpha, double delta, double phi, double mu, double omega, double nu) {
  require_finite({k, alpha, delta, phi, mu, omega, nu});
  require(k > 0.0 && k <= 1.0, "three_level: k must lie in (0, 1]");
  require(alpha * delta > 0.0, "three_level: alpha * delta must be positive");
  require(omega != 0.0, "three_level: omega must be nonzero");
  const Complex e = std::polar(1.0, phi);
  const double ad = alpha * delta;

  ComplexMatrix a = phased_pair(3, 0, 2, e) + phased_pair(3, 1, 2, e);
  a *= Complex(k * delta / std::sqrt(2.0));
  ComplexMatrix c = phased_pair(3, 0, 2, -kImag * e) + phased_pair(3, 1, 2, kImag * e);
  c *= Complex(std::sqrt(ad / 2.0));
  const std::array<double, 3> dd{1.0, -1.0, 0.0};
  ComplexMatrix d = ComplexMatrix::diagonal(dd);
  d *= Complex(k * std::sqrt(ad));

  auto sys = Case2System::create(scaled_identity(3, 1.0 / 3.0), HermitianOperator(a), HermitianOperator(c),
                                 HermitianOperator(d), omega, EllipticModulus(k), nu);
  // The frame change e^{-i mu t P3} rotates the phase of A and C out of the
  // span; their rotated partners get the same eigenvalues.
  const OperatorMap span_map = case2_hamiltonian(sys);
  const Complex e_perp = kImag * e;
  ComplexMatrix a_perp = phased_pair(3, 0, 2, e_perp) + phased_pair(3, 1, 2, e_perp);
  a_perp *= Complex(k * delta / std::sqrt(2.0));
  ComplexMatrix c_perp = phased_pair(3, 0, 2, -kImag * e_perp) + phased_pair(3, 1, 2, kImag * e_perp);
  c_perp *= Complex(std::sqrt(ad / 2.0));
  const double a_eig = frobenius_inner(a, span_map.apply(a)).real() / frobenius_inner(a, a).real();
  const double c_eig = frobenius_inner(c, span_map.apply(c)).real() / frobenius_inner(c, c).real();
  std::vector<GeneratorImage> pairs;
  for (const ComplexMatrix& g : {sys.theta().matrix(), a, c, d}) pairs.emplace_back(g, span_map.apply(g));
  pairs.emplace_back(a_perp, Complex(a_eig) * a_perp);
  pairs.emplace_back(c_perp, Complex(c_eig) * c_perp);
  OperatorMap map = operator_map_from_action(3, pairs);
  const HermitianOperator p3 = level_projector3();
  GaugeTransform gauge{mu * p3, GaugeDirection::Inverse};

  const double lambda = case2_theta_image_coefficient(sys) * k * std::sqrt(ad);
  const double epsilon = a_eig * k * delta / std::sqrt(2.0);
  const std::array<double, 3> block{lambda, -lambda, mu};
  HermitianOperator h0_block(ComplexMatrix::diagonal(block));
  AnalyticPath sigma = conjugated_path(analytic_path(sys), gauge.generator());
  const OperatorMap kmap = gauge_map(gauge, map);

  ThreeLevel out{std::move(sys), map, gauge, phi, mu, lambda, -k * omega * std::sqrt(delta / alpha),
                 k * omega / std::sqrt(2.0),
                 epsilon, h0_block, sigma, {}, {}, {}};
  out.interaction = [kmap, sigma, h0_block](double t) { return kmap.apply(sigma.state(t)) - h0_block.matrix(); };
  const double eq = out.epsilon_quoted;
  const EllipticModulus km(k);
  out.interaction_quoted = [eq, phi, mu, omega, km](double t) {
    const Complex ph = std::polar(1.0, phi - mu * t);
    ComplexMatrix m = phased_pair(3, 0, 2, ph) + phased_pair(3, 1, 2, ph);
    m *= Complex(eq * jacobi_sncndn(omega * t, km).cn);
    return m;
  };
  out.pulse = [phi, mu, omega, km](double t) {
    return std::polar(1.0, phi + mu * t) * jacobi_sncndn(omega * t, km).cn;
  };
  return out;
}

namespace {

EulerTopFamily build_euler_top_family(Case1System sys, const std::vector<double>& h0_diag) {
  OperatorMap map = case1_hamiltonian(sys);
  HermitianOperator h0(ComplexMatrix::diagonal(h0_diag));
  GaugeTransform gauge{(2.0 / 3.0) * h0, GaugeDirection::Forward};
  AnalyticPath sigma = analytic_path(sys);
  AnalyticPath rho = conjugated_path(sigma, -1.0 * gauge.h0);
  return EulerTopFamily{std::move(sys),
                        std::move(map),
                        euler_top_closed_form(h0),
                        off_diagonal_sum_map(h0_diag),
                        h0,
                        gauge,
                        std::move(sigma),
                        std::move(rho)};
}

}  // namespace

EulerTopFamily d3_known(double k, double omega, double phi, double lambda, double mu, double nu) {
  require_finite({k, omega, phi, lambda, mu, nu});
  require(std::abs(lambda) < mu, "d3_known: requires |lambda| < mu");
  require(k > 0.0 && k <= 1.0, "d3_known: k must lie in (0, 1]");
  require(omega != 0.0, "d3_known: omega must be nonzero");
  const Complex e = std::polar(1.0, phi);
  ComplexMatrix b = phased_pair(3, 0, 1, 1.0);
  b *= Complex(k * omega / std::sqrt(mu * mu - lambda * lambda));
  ComplexMatrix a = phased_pair(3, 0, 2, e);
  a *= Complex(k * omega / std::sqrt(2.0 * mu * (mu + lambda)));
  ComplexMatrix x = phased_pair(3, 1, 2, -kImag * e);
  x *= Complex(omega / std::sqrt(2.0 * mu * (mu - lambda)));
  auto sys = Case1System::create(scaled_identity(3, 1.0 / 3.0), HermitianOperator(a), HermitianOperator(b),
                                 HermitianOperator(x), omega, EllipticModulus(k), nu);
  return build_euler_top_family(std::move(sys), {mu, -mu, lambda});
}

EulerTopFamily d3_variation(double b, double omega, double phi, double k, std::optional<double> nu) {
  require_finite({b, omega, phi, k, nu.value_or(0.0)});
  require(b != 0.0, "d3_variation: b must be nonzero");
  require(omega != 0.0, "d3_variation: omega must be nonzero");
  require(k > 0.0 && k <= 1.0, "d3_variation: k must lie in (0, 1]");
  const Complex e = std::polar(1.0, phi);
  ComplexMatrix a = phased_pair(3, 0, 1, 1.0);
  a *= Complex(k * omega / (b * std::sqrt(2.0)));
  ComplexMatrix bb = phased_pair(3, 0, 2, e);
  bb *= Complex(k * omega / b);
  ComplexMatrix x = phased_pair(3, 1, 2, -kImag * e);
  x *= Complex(omega / (b * std::sqrt(2.0)));
  auto sys = Case1System::create(scaled_identity(3, 1.0 / 3.0), HermitianOperator(a), HermitianOperator(bb),
                                 HermitianOperator(x), omega, EllipticModulus(k), nu.value_or(4.0 * b));
  return build_euler_top_family(std::move(sys), {b, 2.0 * b, 3.0 * b});
}

double euler_top_residual(const AnalyticPath& rho, const HermitianOperator& h0, std::span<const double> times) {
  double worst = 0.0;
  for (const double t : times) {
    const ComplexMatrix r = rho.state(t);
    const double res = (rho.derivative(t) - euler_top_rhs(r, h0)).frobenius_norm();
    worst = std::max(worst, std::isfinite(res) ? res : std::numeric_limits<double>::infinity());
  }
  return worst;
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MaxwellBloch:
      return "maxwell_bloch";
    case ScenarioKind::PhaseModulation:
      return "phase_modulation";
    case ScenarioKind::ThreeLevel:
      return "three_level";
    case ScenarioKind::D3Known:
      return "d3_known";
    case ScenarioKind::D3Variation:
      return "d3_variation";
  }
  return "unknown";
}

const std::vector<ScenarioKind>& all_scenarios() {
  static const std::vector<ScenarioKind> kinds{ScenarioKind::MaxwellBloch, ScenarioKind::PhaseModulation,
                                               ScenarioKind::ThreeLevel, ScenarioKind::D3Known,
                                               ScenarioKind::D3Variation};
  return kinds;
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (const auto k : all_scenarios()) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown scenario '" + name + "'");
}

const std::vector<std::string>& scenario_parameter_names(ScenarioKind kind) {
  static const std::map<ScenarioKind, std::vector<std::string>> names{
      {ScenarioKind::MaxwellBloch, {"tau", "delta", "kappa", "nu"}},
      {ScenarioKind::PhaseModulation, {"tau", "delta", "nu"}},
      {ScenarioKind::ThreeLevel, {"k", "alpha", "delta", "phi", "mu", "omega", "nu"}},
      {ScenarioKind::D3Known, {"k", "omega", "phi", "lambda", "mu", "nu"}},
      {ScenarioKind::D3Variation, {"b", "omega", "phi", "k", "nu"}},
  };
  return names.at(kind);
}

std::map<std::string, double> default_parameters(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MaxwellBloch:
      return {{"tau", 1.0}, {"delta", 1.0}, {"kappa", 1.0}, {"nu", 0.0}};
    case ScenarioKind::PhaseModulation:
      return {{"tau", 1.0}, {"delta", 0.5}, {"nu", 0.0}};
    case ScenarioKind::ThreeLevel:
      return {{"k", 0.5}, {"alpha", 2.0}, {"delta", 1.0}, {"phi", 0.0}, {"mu", 1.0}, {"omega", 1.0}, {"nu", 0.0}};
    case ScenarioKind::D3Known:
      return {{"k", 0.5}, {"omega", 1.0}, {"phi", 0.0}, {"lambda", 1.0}, {"mu", 2.0}, {"nu", 0.0}};
    case ScenarioKind::D3Variation:
      return {{"b", 1.0}, {"omega", 1.0}, {"phi", 0.0}, {"k", 0.5}, {"nu", 4.0}};
  }
  return {};
}

ScenarioSpec ScenarioSpec::with_defaults(ScenarioKind kind, const std::map<std::string, double>& overrides) {
  ScenarioSpec spec{kind, default_parameters(kind)};
  for (const auto& [name, value] : overrides) {
    auto it = spec.parameters.find(name);
    if (it == spec.parameters.end()) {
      throw DomainError("scenario " + to_string(kind) + " has no parameter '" + name + "'");
    }
    it->second = value;
  }
  if (kind == ScenarioKind::D3Variation && overrides.find("nu") == overrides.end()) {
    spec.parameters["nu"] = 4.0 * spec.parameters["b"];
  }
  return spec;
}

double ScenarioSpec::get(const std::string& name) const {
  auto it = parameters.find(name);
  if (it == parameters.end()) throw DomainError("missing scenario parameter '" + name + "'");
  return it->second;
}

std::size_t ScenarioInstance::dim() const {
  return std::visit([](const auto& s) { return s.dim(); }, system);
}

double ScenarioInstance::omega() const {
  return std::visit([](const auto& s) { return s.omega(); }, system);
}

EllipticModulus ScenarioInstance::k() const {
  return std::visit([](const auto& s) { return s.k(); }, system);
}

double ScenarioInstance::nu() const {
  return std::visit([](const auto& s) { return s.nu(); }, system);
}

double ScenarioInstance::period() const {
  if (k().value() >= 1.0) return std::numeric_limits<double>::infinity();
  return 4.0 * complete_elliptic_K(k()) / std::abs(omega());
}

std::pair<double, double> ScenarioInstance::default_span() const {
  if (k().value() >= 1.0) {
    const double w = std::abs(omega());
    return {-10.0 / w, 10.0 / w};
  }
  return {0.0, period()};
}

namespace {

void add_constants(ScenarioInstance& inst, const StructureConstants& c) {
  inst.metadata["alpha"] = c.alpha;
  inst.metadata[c.tag == CaseTag::Case1 ? "beta" : "delta_constant"] = c.second;
  inst.metadata["fit_residual"] = c.fit_residual;
}

}  // namespace

ScenarioInstance make_scenario(const ScenarioSpec& spec) {
  ScenarioSpec s = ScenarioSpec::with_defaults(spec.kind, spec.parameters);
  switch (s.kind) {
    case ScenarioKind::MaxwellBloch: {
      auto mb = maxwell_bloch(s.get("tau"), s.get("delta"), s.get("kappa"), s.get("nu"));
      ScenarioInstance inst{s, CaseTag::Case2, mb.system, mb.map, analytic_path(mb.system), {}, {}, {}};
      add_constants(inst, mb.system.constants());
      inst.metadata["t_D"] = mb.system.t_coeffs()[2];
      const ComplexMatrix image = mb.map.apply(pauli(0));
      inst.metadata["identity_image_sigma3"] = 0.5 * frobenius_inner(pauli(3), image).real();
      const double w = mb.system.omega();
      const double dl = mb.detuning;
      inst.metadata["identity_image_sigma3_quoted"] = -2.0 * w * w * w / (w * w + dl * dl);
      return inst;
    }
    case ScenarioKind::PhaseModulation: {
      auto pm = phase_modulation(s.get("tau"), s.get("delta"), s.get("nu"));
      ScenarioInstance inst{s, CaseTag::Case1, pm.system, pm.map, analytic_path(pm.system), {}, {}, {}};
      add_constants(inst, pm.system.constants());
      return inst;
    }
    case ScenarioKind::ThreeLevel: {
      auto tl = three_level(s.get("k"), s.get("alpha"), s.get("delta"), s.get("phi"), s.get("mu"),
                            s.get("omega"), s.get("nu"));
      ScenarioInstance inst{s, CaseTag::Case2, tl.system, tl.map, analytic_path(tl.system), {}, {}, {}};
      add_constants(inst, tl.system.constants());
      inst.metadata["t_D"] = tl.system.t_coeffs()[2];
      inst.metadata["lambda"] = tl.lambda;
      inst.metadata["lambda_quoted"] = tl.lambda_quoted;
      inst.metadata["epsilon"] = tl.epsilon;
      inst.metadata["epsilon_quoted"] = tl.epsilon_quoted;
      inst.gauge = GaugePair{tl.gauge, tl.map, inst.path, gauge_map(tl.gauge, tl.map), tl.sigma};
      return inst;
    }
    case ScenarioKind::D3Known:
    case ScenarioKind::D3Variation: {
      auto fam = s.kind == ScenarioKind::D3Known
                     ? d3_known(s.get("k"), s.get("omega"), s.get("phi"), s.get("lambda"), s.get("mu"), s.get("nu"))
                     : d3_variation(s.get("b"), s.get("omega"), s.get("phi"), s.get("k"), s.get("nu"));
      ScenarioInstance inst{s, CaseTag::Case1, fam.system, fam.map, fam.sigma, {}, {}, {}};
      add_constants(inst, fam.system.constants());
      inst.gauge = GaugePair{fam.gauge, anticommutator_map(fam.h0), fam.rho, fam.closed_form, fam.sigma};
      inst.euler_top_h0 = fam.h0;
      return inst;
    }
  }
  throw DomainError("unknown scenario kind");
}

}  // namespace ellvne

#pragma once

/// \file scenarios.hpp
/// Preset special solutions: two-level Maxwell-Bloch pulses (with and without
/// phase modulation), a pulsed three-level system, and two d = 3 families that
/// reduce to the Euler top i d(rho)/dt = [H0, rho^2].

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ellvne/dynamics.hpp"
#include "ellvne/elliptic.hpp"
#include "ellvne/matrix.hpp"
#include "ellvne/operator_map.hpp"
#include "ellvne/special_solutions.hpp"

namespace ellvne {

struct BlochVector {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  double norm() const;
};

/// u_a = Tr(rho sigma_a). Requires dim 2 and trace 1 within 1e-10.
BlochVector bloch_decompose(const HermitianOperator& rho);
/// Components Tr(m sigma_a) of any 2 x 2 matrix (real parts), no trace check.
BlochVector bloch_components(const ComplexMatrix& m);
/// (1 + u . sigma) / 2.
HermitianOperator bloch_compose(const BlochVector& u);

struct MaxwellBloch {
  Case2System system;
  OperatorMap map;
  double tau = 1.0;
  double detuning = 1.0;
  double kappa = 1.0;
  /// Field envelope 2 / (kappa tau) sech(t / tau).
  std::function<double(double)> field;
};

/// k = 1, omega = 1/tau, A, C, D proportional to sigma_1, sigma_2, sigma_3 and
/// theta0 = I/2. Throws DomainError for tau = 0 or kappa <= 0, and
/// DegenerateConstantsError for detuning = 0.
MaxwellBloch maxwell_bloch(double tau, double detuning, double kappa = 1.0, double nu = 0.0);

/// Images H[sigma_1] = -(omega^2 + Delta^2)/Delta sigma_1, H[sigma_2] = H[sigma_3] = 0
/// and the alternative H[I] = -2 omega^3/(omega^2 + Delta^2) sigma_3.
OperatorMap maxwell_bloch_quoted_map(const MaxwellBloch& mb);

/// max(|u1' + Delta u2|, |u2' - Delta u1 - kappa E u3|, |u3' + kappa E u2|) at t.
double maxwell_bloch_equation_defect(const MaxwellBloch& mb, double t);

struct PhaseModulation {
  Case1System system;
  OperatorMap map;
  double tau = 1.0;
  double chirp = 0.5;
};

/// k = 1, omega = 1/tau, theta = I/2, B = sigma_3/2 and A, X along sigma_1, sigma_2.
/// Throws DomainError for tau = 0 or chirp = 0.
PhaseModulation phase_modulation(double tau, double chirp, double nu = 0.0);

/// max(|u1' + u1 u3/tau|, |u2' + u2 u3/tau|, |u3' - (u1^2 + u2^2)/tau|) at t.
double phase_modulation_equation_defect(const PhaseModulation& pm, double t);

/// P_3 = diag(0, 0, 1).
HermitianOperator level_projector3();

struct ThreeLevel {
  Case2System system;
  OperatorMap map;
  /// H0 = mu P_3 applied in the inverse direction: sigma = e^{-i mu t P3} rho e^{i mu t P3}.
  GaugeTransform gauge;
  double phi = 0.0;
  double mu = 1.0;
  /// Diagonal entry of H[theta]: h_theta k sqrt(alpha delta).
  double lambda = 0.0;
  /// Alternative value -k omega sqrt(delta/alpha).
  double lambda_quoted = 0.0;
  /// Alternative pulse amplitude k omega / sqrt(2).
  double epsilon_quoted = 0.0;
  /// Off-diagonal amplitude produced by the map: H[A] coefficient times k delta/sqrt 2.
  double epsilon = 0.0;
  /// diag(lambda, -lambda, mu).
  HermitianOperator h0_block;
  /// sigma(t) with derivative.
  AnalyticPath sigma;
  /// H_I(t) = H[sigma] + mu P_3 - diag(lambda, -lambda, mu).
  std::function<ComplexMatrix(double)> interaction;
  /// epsilon_quoted cn(omega t) with phases e^{+-i(phi - mu t)} on the (1,3), (2,3) pattern.
  std::function<ComplexMatrix(double)> interaction_quoted;
  /// Complex pulse envelope e^{i(phi + mu t)} cn(omega t, k) matching `interaction`.
  std::function<Complex(double)> pulse;
};

/// The operators close with structure constants (-alpha, -delta).
/// The map is the theorem map on span{theta, A, C, D}, extended to the
/// phase-rotated partners of A and C so that it commutes with e^{i s P3}.
/// Throws DomainError unless 0 < k <= 1 and alpha delta > 0.
ThreeLevel three_level(double k, double alpha, double delta, double phi, double mu, double omega = 1.0,
                       double nu = 0.0);

struct EulerTopFamily {
  Case1System system;
  /// Theorem map acting on sigma.
  OperatorMap map;
  /// {H0, sigma} - (2/3) Tr(sigma) H0.
  OperatorMap closed_form;
  /// Entrywise form c_ij = h_i + h_j with zero diagonal.
  OperatorMap entrywise;
  HermitianOperator h0;
  /// Forward gauge with generator (2/3) H0 from rho (Euler top) to sigma.
  GaugeTransform gauge;
  AnalyticPath sigma;
  /// rho(t) = e^{-(2/3) i t H0} sigma(t) e^{(2/3) i t H0}.
  AnalyticPath rho;
};

/// H0 = diag(mu, -mu, lambda). Throws DomainError unless |lambda| < mu,
/// 0 < k <= 1 and omega != 0.
EulerTopFamily d3_known(double k, double omega, double phi, double lambda, double mu, double nu = 0.0);

/// H0 = b diag(1, 2, 3); alpha = beta = -omega/b. Throws DomainError for
/// b = 0, omega = 0 or k outside (0, 1].
EulerTopFamily d3_variation(double b, double omega, double phi, double k, std::optional<double> nu = {});

/// max ||rho' + i[H0, rho^2]||_F at the given times.
double euler_top_residual(const AnalyticPath& rho, const HermitianOperator& h0, std::span<const double> times);

enum class ScenarioKind { MaxwellBloch, PhaseModulation, ThreeLevel, D3Known, D3Variation };

std::string to_string(ScenarioKind kind);
/// Throws DomainError for unknown names.
ScenarioKind scenario_kind_from_string(const std::string& name);
const std::vector<ScenarioKind>& all_scenarios();

/// Parameter names accepted by a scenario, in canonical order.
const std::vector<std::string>& scenario_parameter_names(ScenarioKind kind);
std::map<std::string, double> default_parameters(ScenarioKind kind);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::MaxwellBloch;
  std::map<std::string, double> parameters;

  /// Defaults for the kind, overridden by `overrides`. Unknown names throw DomainError.
  static ScenarioSpec with_defaults(ScenarioKind kind, const std::map<std::string, double>& overrides = {});
  double get(const std::string& name) const;
};

struct GaugePair {
  /// rho picture -> sigma picture.
  GaugeTransform transform;
  OperatorMap rho_map;
  AnalyticPath rho_path;
  OperatorMap sigma_map;
  AnalyticPath sigma_path;
};

/// Uniform view of a constructed scenario.
struct ScenarioInstance {
  ScenarioSpec spec;
  CaseTag tag = CaseTag::Case1;
  std::variant<Case1System, Case2System> system;
  OperatorMap map;
  /// Analytic reference for the state driven by `map`.
  AnalyticPath path;
  /// Frame change between a rho picture and a sigma picture; one of the two
  /// pictures coincides with (map, path).
  std::optional<GaugePair> gauge;
  /// Euler-top H0 for the d = 3 families.
  std::optional<HermitianOperator> euler_top_h0;
  /// Extra scalar data (structure constants, quoted values).
  std::map<std::string, double> metadata;

  std::size_t dim() const;
  double omega() const;
  EllipticModulus k() const;
  double nu() const;
  /// 4K(k)/|omega|; infinity for k = 1.
  double period() const;
  /// One period from 0 for k < 1, [-10, 10]/|omega| for k = 1.
  std::pair<double, double> default_span() const;
};

ScenarioInstance make_scenario(const ScenarioSpec& spec);

}  // namespace ellvne

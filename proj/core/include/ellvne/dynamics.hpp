#pragma once

/// \file dynamics.hpp
/// Numerical integration of i d(rho)/dt = [H[rho], rho], of the Euler top
/// i d(rho)/dt = [H0, rho^2], and of the propagator dU/dt = i U H[rho_t];
/// elimination of a linear part (Tr sigma) H0 by a time-dependent unitary
/// frame change; conservation diagnostics.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "ellvne/errors.hpp"
#include "ellvne/matrix.hpp"
#include "ellvne/operator_map.hpp"
#include "ellvne/special_solutions.hpp"

namespace ellvne {

/// Step-size control for the embedded Dormand-Prince 5(4) pair.
struct IntegratorControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Zero picks a step from the initial derivative.
  double initial_step = 0.0;
  /// Smallest admissible |h| relative to max(1, |t|).
  double min_step = 1e-13;
  std::size_t max_steps = 5'000'000;
};

/// Raised when the step size underflows; carries the last accepted state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time, ComplexMatrix last_state)
      : Error(what), time_(time), last_state_(std::move(last_state)) {}
  double time() const noexcept { return time_; }
  const ComplexMatrix& last_state() const noexcept { return last_state_; }

 private:
  double time_;
  ComplexMatrix last_state_;
};

/// -i (H[rho] rho - rho H[rho]).
ComplexMatrix vne_rhs(const ComplexMatrix& rho, const OperatorMap& h);
/// -i [H0, rho^2].
ComplexMatrix euler_top_rhs(const ComplexMatrix& rho, const HermitianOperator& h0);

struct MapRhs {
  OperatorMap h;
};
struct EulerTopRhs {
  HermitianOperator h0;
};
using RhsSpec = std::variant<MapRhs, EulerTopRhs>;

using MatrixOde = std::function<ComplexMatrix(double t, const ComplexMatrix& y)>;

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Integrates y' = f(t, y) from (t0, y0) and returns y at every sample time.
/// Samples may lie on both sides of t0; they are returned in the given order.
std::vector<ComplexMatrix> integrate_matrix_ode(const MatrixOde& f, const ComplexMatrix& y0, double t0,
                                                std::span<const double> sample_times,
                                                const IntegratorControl& control = {},
                                                IntegrationStats* stats = nullptr);

struct SampleDiagnostics {
  Complex trace;
  std::vector<double> spectrum;  // of the Hermitian part, ascending
  double hermiticity_defect = 0.0;
  std::optional<double> residual;  // ||rho - rho_ref||_F when a reference is attached
};

struct Trajectory {
  std::vector<double> times;  // strictly increasing
  std::vector<ComplexMatrix> states;  // Hermitian up to integration error
  std::vector<SampleDiagnostics> diagnostics;
  IntegrationStats stats;
};


/// Integrates from rho(t0) = rho0; sample_times must be strictly increasing.
Trajectory integrate(const HermitianOperator& rho0, double t0, const RhsSpec& rhs,
                     std::span<const double> sample_times, const IntegratorControl& control = {});

/// Fills SampleDiagnostics::residual against a reference path.
void attach_reference(Trajectory& traj, const std::function<ComplexMatrix(double)>& reference);

struct ConservationReport {
  double max_trace_drift = 0.0;
  double max_eigenvalue_drift = 0.0;
  double max_hermiticity_defect = 0.0;
  std::optional<double> max_residual;
};

/// Drifts are measured against the first sample.
ConservationReport conservation_report(const Trajectory& traj);

struct Propagator {
  std::vector<double> times;
  std::vector<ComplexMatrix> unitaries;
  std::vector<double> unitarity_defect;  // ||U U^* - I||_F
};

/// dU/dt = i U H[rho_t] with U(t0) = I; rho_t is supplied by `state_at`.
Propagator integrate_propagator(const std::function<ComplexMatrix(double)>& state_at, const OperatorMap& h,
                                double t0, std::span<const double> sample_times,
                                const IntegratorControl& control = {});

/// Piecewise-linear interpolation of trajectory samples; second-order
/// accurate in the sample spacing. Clamps outside the sampled range.
std::function<ComplexMatrix(double)> linear_interpolant(const Trajectory& traj);

enum class GaugeDirection {
  Forward,  // sigma = e^{i t H0} rho e^{-i t H0},  K[sigma] = H[sigma] - Tr(sigma) H0
  Inverse,  // sigma = e^{-i t H0} rho e^{i t H0},  K[sigma] = H[sigma] + Tr(sigma) H0
};

struct GaugeTransform {
  HermitianOperator h0;
  GaugeDirection direction = GaugeDirection::Forward;

  /// The generator G with sigma = e^{i t G} rho e^{-i t G}.
  HermitianOperator generator() const;
};

/// rho -> sigma at time t.
ComplexMatrix gauge_apply(const GaugeTransform& g, const ComplexMatrix& rho, double t);
/// sigma -> rho at time t.
ComplexMatrix gauge_undo(const GaugeTransform& g, const ComplexMatrix& sigma, double t);
/// K[sigma] = H[sigma] - Tr(sigma) G.
OperatorMap gauge_map(const GaugeTransform& g, const OperatorMap& h);

/// psi(t) = e^{i t s} phi(t) e^{-i t s} with its analytic derivative.
AnalyticPath conjugated_path(const AnalyticPath& phi, const HermitianOperator& s);

/// Max over times of ||H[e^{itG} rho e^{-itG}] - e^{itG} H[rho] e^{-itG}||_F,
/// relative to max(1, ||H[rho]||_F); also reports the worst time.
std::pair<double, double> covariance_defect(const GaugeTransform& g, const OperatorMap& h,
                                            const std::function<ComplexMatrix(double)>& rho,
                                            std::span<const double> times);

inline constexpr double kCovarianceTol = 1e-9;
inline constexpr std::size_t kCovarianceSamples = 32;

struct GaugeResult {
  OperatorMap k;
  std::vector<double> times;
  std::vector<ComplexMatrix> sigma;
  double covariance_defect = 0.0;
  /// max ||d(sigma)/dt + i[K[sigma], sigma]||_F; present for analytic input.
  std::optional<double> residual;
};

/// Checks the covariance condition on kCovarianceSamples points spanning the
/// sample times, then returns K and the transformed states. Throws GaugeError
/// when the condition fails.
GaugeResult gauge_forward(const GaugeTransform& g, const OperatorMap& h, const AnalyticPath& rho,
                          std::span<const double> times);
GaugeResult gauge_forward(const GaugeTransform& g, const OperatorMap& h, const Trajectory& traj);

}  // namespace ellvne

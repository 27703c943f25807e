#include "ellvne/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace ellvne {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr std::array<std::array<double, 6>, 7> kA{{
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
constexpr std::array<double, 7> kE{71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

ComplexMatrix combine(const ComplexMatrix& y, double h, const std::array<ComplexMatrix, 7>& k,
                      const std::array<double, 6>& w, std::size_t stages) {
  ComplexMatrix out = y;
  auto o = out.data();
  for (std::size_t s = 0; s < stages; ++s) {
    if (w[s] == 0.0) continue;
    const double f = h * w[s];
    auto ks = k[s].data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += f * ks[i];
  }
  return out;
}

double error_norm(const ComplexMatrix& y, const ComplexMatrix& y_new, double h,
                  const std::array<ComplexMatrix, 7>& k, const IntegratorControl& c) {
  const std::size_t n = y.data().size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex e{0.0, 0.0};
    for (std::size_t s = 0; s < 7; ++s) e += kE[s] * k[s].data()[i];
    e *= h;
    const double scale_re =
        c.atol + c.rtol * std::max(std::abs(y.data()[i].real()), std::abs(y_new.data()[i].real()));
    const double scale_im =
        c.atol + c.rtol * std::max(std::abs(y.data()[i].imag()), std::abs(y_new.data()[i].imag()));
    acc += (e.real() / scale_re) * (e.real() / scale_re) + (e.imag() / scale_im) * (e.imag() / scale_im);
  }
  return std::sqrt(acc / static_cast<double>(2 * n));
}

double initial_step(const MatrixOde& f, double t0, const ComplexMatrix& y0, const ComplexMatrix& f0,
                    const IntegratorControl& c) {
  const double y_norm = y0.frobenius_norm();
  const double f_norm = f0.frobenius_norm();
  double h = (y_norm < 1e-5 || f_norm < 1e-5) ? 1e-6 : 0.01 * y_norm / f_norm;
  const ComplexMatrix y1 = y0 + Complex(h) * f0;
  const double d2 = (f(t0 + h, y1) - f0).frobenius_norm() / h;
  const double dmax = std::max(f_norm, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h * 1e-3)
                                  : std::pow(0.01 * std::max(c.rtol, 1e-14) / dmax, 1.0 / 5.0);
  return std::min({100.0 * h, h1, 0.1});
}

// Advances from (t, y) to each target in order; all targets lie on one side of t.
void sweep(const MatrixOde& f, double t, ComplexMatrix y, const std::vector<std::size_t>& order,
           std::span<const double> targets, std::vector<ComplexMatrix>& out, const IntegratorControl& c,
           IntegrationStats& stats, double direction) {
  if (order.empty()) return;
  std::array<ComplexMatrix, 7> k;
  k[0] = f(t, y);
  ++stats.rhs_evaluations;
  double h = c.initial_step > 0.0 ? c.initial_step : initial_step(f, t, y, k[0], c);
  ++stats.rhs_evaluations;
  std::size_t steps = 0;

  for (const std::size_t idx : order) {
    const double target = targets[idx];
    while (direction * (target - t) > 0.0) {
      if (++steps > c.max_steps) {
        throw IntegrationError("step budget exhausted at t=" + std::to_string(t), t, y);
      }
      const double remaining = std::abs(target - t);
      bool clamped = false;
      double step = h;
      if (step >= remaining) {
        step = remaining;
        clamped = true;
      }
      const double hs = direction * step;
      for (std::size_t s = 1; s < 7; ++s) {
        k[s] = f(t + kC[s] * hs, combine(y, hs, k, kA[s], s));
        ++stats.rhs_evaluations;
      }
      // Row 6 of the tableau is the fifth-order solution (FSAL).
      ComplexMatrix y_new = combine(y, hs, k, kA[6], 6);
      const double err = error_norm(y, y_new, hs, k, c);
      if (!std::isfinite(err) || !y_new.all_finite()) {
        ++stats.rejected;
        h = step * 0.2;
      } else if (err <= 1.0) {
        ++stats.accepted;
        t = clamped ? target : t + hs;
        y = std::move(y_new);
        k[0] = k[6];
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clamped step says nothing about the natural step size.
        h = clamped ? std::max(h, step * factor) : step * factor;
        continue;
      } else {
        ++stats.rejected;
        h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
      if (h < c.min_step * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow at t=" + std::to_string(t), t, y);
      }
    }
    out[idx] = y;
  }
}

}  // namespace

ComplexMatrix vne_rhs(const ComplexMatrix& rho, const OperatorMap& h) {
  return Complex(0.0, -1.0) * commutator(h.apply(rho), rho);
}

ComplexMatrix euler_top_rhs(const ComplexMatrix& rho, const HermitianOperator& h0) {
  return Complex(0.0, -1.0) * commutator(h0.matrix(), rho * rho);
}

std::vector<ComplexMatrix> integrate_matrix_ode(const MatrixOde& f, const ComplexMatrix& y0, double t0,
                                                std::span<const double> sample_times,
                                                const IntegratorControl& control, IntegrationStats* stats) {
  if (!(control.rtol > 0.0) || !(control.atol > 0.0)) {
    throw DomainError("integrator tolerances must be positive");
  }
  if (!std::isfinite(t0) || !y0.all_finite()) throw DomainError("non-finite initial data");
  std::vector<std::size_t> forward;
  std::vector<std::size_t> backward;
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (!std::isfinite(sample_times[i])) throw DomainError("non-finite sample time");
    (sample_times[i] >= t0 ? forward : backward).push_back(i);
  }
  std::sort(forward.begin(), forward.end(),
            [&](std::size_t a, std::size_t b) { return sample_times[a] < sample_times[b]; });
  std::sort(backward.begin(), backward.end(),
            [&](std::size_t a, std::size_t b) { return sample_times[a] > sample_times[b]; });

  std::vector<ComplexMatrix> out(sample_times.size());
  IntegrationStats local;
  sweep(f, t0, y0, forward, sample_times, out, control, local, 1.0);
  sweep(f, t0, y0, backward, sample_times, out, control, local, -1.0);
  if (stats != nullptr) *stats = local;
  return out;
}

Trajectory integrate(const HermitianOperator& rho0, double t0, const RhsSpec& rhs,
                     std::span<const double> sample_times, const IntegratorControl& control) {
  for (std::size_t i = 1; i < sample_times.size(); ++i) {
    if (!(sample_times[i] > sample_times[i - 1])) {
      throw DomainError("sample times must be strictly increasing");
    }
  }
  const std::size_t d = rho0.dim();
  MatrixOde f = std::visit(
      [d](const auto& spec) -> MatrixOde {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, MapRhs>) {
          if (spec.h.dim() != d) throw DimensionMismatch("map dimension differs from state dimension");
          return [h = spec.h](double, const ComplexMatrix& y) { return vne_rhs(y, h); };
        } else {
          if (spec.h0.dim() != d) throw DimensionMismatch("H0 dimension differs from state dimension");
          return [h0 = spec.h0](double, const ComplexMatrix& y) { return euler_top_rhs(y, h0); };
        }
      },
      rhs);

  Trajectory traj;
  traj.times.assign(sample_times.begin(), sample_times.end());
  traj.states = integrate_matrix_ode(f, rho0.matrix(), t0, sample_times, control, &traj.stats);
  traj.diagnostics.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    SampleDiagnostics diag;
    diag.trace = s.trace();
    diag.spectrum = hermitian_part_spectrum(s).eigenvalues;
    diag.hermiticity_defect = s.hermiticity_defect();
    traj.diagnostics.push_back(std::move(diag));
  }
  return traj;
}

void attach_reference(Trajectory& traj, const std::function<ComplexMatrix(double)>& reference) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    traj.diagnostics[i].residual = frobenius_distance(traj.states[i], reference(traj.times[i]));
  }
}

ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport r;
  if (traj.diagnostics.empty()) return r;
  const auto& first = traj.diagnostics.front();
  bool any_residual = false;
  double max_res = 0.0;
  for (const auto& d : traj.diagnostics) {
    r.max_trace_drift = std::max(r.max_trace_drift, std::abs(d.trace - first.trace));
    for (std::size_t j = 0; j < d.spectrum.size(); ++j) {
      r.max_eigenvalue_drift = std::max(r.max_eigenvalue_drift, std::abs(d.spectrum[j] - first.spectrum[j]));
    }
    r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, d.hermiticity_defect);
    if (d.residual) {
      any_residual = true;
      max_res = std::max(max_res, *d.residual);
    }
  }
  if (any_residual) r.max_residual = max_res;
  return r;
}

Propagator integrate_propagator(const std::function<ComplexMatrix(double)>& state_at, const OperatorMap& h,
                                double t0, std::span<const double> sample_times,
                                const IntegratorControl& control) {
  const std::size_t d = h.dim();
  MatrixOde f = [&](double t, const ComplexMatrix& u) {
    return Complex(0.0, 1.0) * (u * h.apply(state_at(t)));
  };
  Propagator p;
  p.times.assign(sample_times.begin(), sample_times.end());
  p.unitaries = integrate_matrix_ode(f, ComplexMatrix::identity(d), t0, sample_times, control);
  const ComplexMatrix id = ComplexMatrix::identity(d);
  for (const auto& u : p.unitaries) p.unitarity_defect.push_back(frobenius_distance(u * u.adjoint(), id));
  return p;
}

std::function<ComplexMatrix(double)> linear_interpolant(const Trajectory& traj) {
  if (traj.times.empty()) throw DomainError("empty trajectory");
  return [times = traj.times, states = traj.states](double t) {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return Complex(1.0 - w) * states[j - 1] + Complex(w) * states[j];
  };
}

HermitianOperator GaugeTransform::generator() const {
  return direction == GaugeDirection::Forward ? h0 : -1.0 * h0;
}

ComplexMatrix gauge_apply(const GaugeTransform& g, const ComplexMatrix& rho, double t) {
  return conjugate_by_exponential(rho, g.generator(), t);
}

ComplexMatrix gauge_undo(const GaugeTransform& g, const ComplexMatrix& sigma, double t) {
  return conjugate_by_exponential(sigma, g.generator(), -t);
}

OperatorMap gauge_map(const GaugeTransform& g, const OperatorMap& h) {
  if (g.h0.dim() != h.dim()) throw DimensionMismatch("H0 dimension differs from map dimension");
  return h - Complex(1.0) * trace_map(g.generator());
}

AnalyticPath conjugated_path(const AnalyticPath& phi, const HermitianOperator& s) {
  AnalyticPath out;
  out.state = [phi, s](double t) { return conjugate_by_exponential(phi.state(t), s, t); };
  out.derivative = [phi, s](double t) {
    const ComplexMatrix psi = conjugate_by_exponential(phi.state(t), s, t);
    return Complex(0.0, 1.0) * commutator(s.matrix(), psi) + conjugate_by_exponential(phi.derivative(t), s, t);
  };
  return out;
}

std::pair<double, double> covariance_defect(const GaugeTransform& g, const OperatorMap& h,
                                            const std::function<ComplexMatrix(double)>& rho,
                                            std::span<const double> times) {
  const HermitianOperator gen = g.generator();
  double worst = 0.0;
  double worst_t = times.empty() ? 0.0 : times.front();
  for (const double t : times) {
    const ComplexMatrix r = rho(t);
    const ComplexMatrix hr = h.apply(r);
    const ComplexMatrix lhs = h.apply(conjugate_by_exponential(r, gen, t));
    const ComplexMatrix rhs = conjugate_by_exponential(hr, gen, t);
    const double defect = frobenius_distance(lhs, rhs) / std::max(1.0, hr.frobenius_norm());
    if (defect > worst || !std::isfinite(defect)) {
      worst = defect;
      worst_t = t;
    }
  }
  return {worst, worst_t};
}

namespace {

std::vector<double> covariance_times(std::span<const double> times) {
  if (times.empty()) return {};
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  if (*lo == *hi) return {*lo};
  return uniform_grid(*lo, *hi, kCovarianceSamples);
}

void require_covariance(const std::pair<double, double>& cov) {
  if (!(cov.first <= kCovarianceTol)) {
    throw GaugeError("map is not covariant under the gauge unitary (defect " + std::to_string(cov.first) +
                         " at t=" + std::to_string(cov.second) + ")",
                     cov.first, cov.second);
  }
}

}  // namespace

GaugeResult gauge_forward(const GaugeTransform& g, const OperatorMap& h, const AnalyticPath& rho,
                          std::span<const double> times) {
  const auto check = covariance_times(times);
  const auto cov = covariance_defect(g, h, rho.state, check);
  require_covariance(cov);
  GaugeResult r;
  r.k = gauge_map(g, h);
  r.covariance_defect = cov.first;
  r.times.assign(times.begin(), times.end());
  const AnalyticPath sigma = conjugated_path(rho, g.generator());
  r.sigma.reserve(times.size());
  for (const double t : times) r.sigma.push_back(sigma.state(t));
  r.residual = max_vne_residual(sigma, r.k, times);
  return r;
}

GaugeResult gauge_forward(const GaugeTransform& g, const OperatorMap& h, const Trajectory& traj) {
  const auto interp = linear_interpolant(traj);
  std::vector<double> check;
  if (!traj.times.empty()) {
    const std::size_t n = traj.times.size();
    const std::size_t m = std::min(n, kCovarianceSamples);
    for (std::size_t i = 0; i < m; ++i) check.push_back(traj.times[m == 1 ? 0 : i * (n - 1) / (m - 1)]);
  }
  const auto cov = covariance_defect(g, h, interp, check);
  require_covariance(cov);
  GaugeResult r;
  r.k = gauge_map(g, h);
  r.covariance_defect = cov.first;
  r.times = traj.times;
  r.sigma.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) r.sigma.push_back(gauge_apply(g, traj.states[i], traj.times[i]));
  return r;
}

}  // namespace ellvne

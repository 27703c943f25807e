#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's elliptic or eigen code.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ellvne/matrix.hpp"

namespace oracle {

struct Triple {
  double sn, cn, dn;
};

// Classical RK4 on sn' = cn dn, cn' = -sn dn, dn' = -k^2 sn cn from u = 0.
// `points` must be non-negative and ascending.
inline std::vector<Triple> rk4_jacobi(const std::vector<double>& points, double k, double h = 2e-4) {
  const double m = k * k;
  auto f = [m](const std::array<double, 3>& y) {
    return std::array<double, 3>{y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]};
  };
  std::array<double, 3> y{0.0, 1.0, 1.0};
  double u = 0.0;
  std::vector<Triple> out;
  for (const double target : points) {
    while (u < target) {
      const double s = std::min(h, target - u);
      const auto k1 = f(y);
      std::array<double, 3> t{};
      for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * s * k1[i];
      const auto k2 = f(t);
      for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * s * k2[i];
      const auto k3 = f(t);
      for (int i = 0; i < 3; ++i) t[i] = y[i] + s * k3[i];
      const auto k4 = f(t);
      for (int i = 0; i < 3; ++i) y[i] += s / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      u += s;
    }
    out.push_back({y[0], y[1], y[2]});
  }
  return out;
}

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

inline double elliptic_K_quadrature(double k) {
  return adaptive_simpson([k](double th) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(th) * std::sin(th)); },
                          0.0, std::numbers::pi / 2, 1e-14);
}

// Eigenvalues of a 3x3 Hermitian matrix from its characteristic polynomial
// (trigonometric form of the cubic roots), ascending.
inline std::array<double, 3> hermitian3_eigenvalues(const ellvne::ComplexMatrix& a) {
  const double a11 = a(0, 0).real();
  const double a22 = a(1, 1).real();
  const double a33 = a(2, 2).real();
  const double n12 = std::norm(a(0, 1));
  const double n13 = std::norm(a(0, 2));
  const double n23 = std::norm(a(1, 2));
  const double c2 = a11 + a22 + a33;
  const double c1 = a11 * a22 + a11 * a33 + a22 * a33 - n12 - n13 - n23;
  const double c0 = a11 * a22 * a33 + 2 * (a(0, 1) * a(1, 2) * a(2, 0)).real() - a11 * n23 - a22 * n13 - a33 * n12;
  // lambda^3 - c2 lambda^2 + c1 lambda - c0 = 0; shift lambda = x + c2/3.
  const double s = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -c0 + c1 * s - 2.0 * s * s * s;
  // x^3 + p x + q = 0 with p <= 0 for real roots.
  std::array<double, 3> r{};
  if (std::abs(p) < 1e-300) {
    r = {s, s, s};
  } else {
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * mag), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int j = 0; j < 3; ++j) r[j] = s + mag * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0);
  }
  std::sort(r.begin(), r.end());
  return r;
}

inline ellvne::ComplexMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ellvne::ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = g(rng);
    for (std::size_t j = i + 1; j < d; ++j) {
      m(i, j) = {g(rng), g(rng)};
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

// Central difference of a matrix-valued function.
inline ellvne::ComplexMatrix central_difference(const std::function<ellvne::ComplexMatrix(double)>& f, double t,
                                                double h) {
  return ellvne::Complex(1.0 / (2.0 * h)) * (f(t + h) - f(t - h));
}

}  // namespace oracle

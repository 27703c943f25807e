#include "ellvne/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ellvne/errors.hpp"

namespace ellvne {

namespace {

constexpr int kMaxAgmSteps = 32;

}  // namespace

double sech(double x) {
  // cosh overflows near |x| = 710 while sech is exactly representable as 0 there.
  if (std::abs(x) > 700.0) return 0.0;
  return 1.0 / std::cosh(x);
}

EllipticModulus::EllipticModulus(double k) : k_(k) {
  if (!std::isfinite(k) || k < 0.0 || k > 1.0) {
    throw DomainError("elliptic modulus must lie in [0, 1], got " + std::to_string(k));
  }
}

double EllipticModulus::complementary() const noexcept {
  return std::sqrt((1.0 - k_) * (1.0 + k_));
}

EllipticTriple jacobi_sncndn(double u, EllipticModulus k) {
  if (!std::isfinite(u)) throw DomainError("jacobi_sncndn: argument is not finite");
  const double kv = k.value();
  if (kv == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (kv == 1.0) {
    const double s = sech(u);
    return {std::tanh(u), s, s};
  }

  // Descending AGM: a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n),
  // c_{n+1} = (a_n - b_n)/2, starting from (1, k', k).
  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  a[0] = 1.0;
  double b = k.complementary();
  c[0] = kv;
  int n = 0;
  while (std::abs(c[n]) > 0.5 * std::numeric_limits<double>::epsilon() * a[n] && n < kMaxAgmSteps) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  // Amplitude by backward recurrence phi_{n-1} = (phi_n + asin(c_n sin(phi_n) / a_n)) / 2.
  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j > 0; --j) {
    phi = 0.5 * (phi + std::asin(c[j] * std::sin(phi) / a[j]));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn >= k' > 0 on the real line, so the positive root is the right branch.
  const double dn = std::sqrt(std::max(0.0, 1.0 - k.squared() * sn * sn));
  return {sn, cn, dn};
}

double identity_defect(const EllipticTriple& t, EllipticModulus k) {
  const double circ = std::abs(t.sn * t.sn + t.cn * t.cn - 1.0);
  const double delta = std::abs(t.dn * t.dn + k.squared() * t.sn * t.sn - 1.0);
  return std::max(circ, delta);
}

EllipticDerivatives jacobi_derivatives(const EllipticTriple& t, EllipticModulus k) {
  if (!(identity_defect(t, k) <= 1e-10)) {
    throw DomainError("jacobi_derivatives: triple violates the elliptic identities");
  }
  return {t.cn * t.dn, -t.sn * t.dn, -k.squared() * t.sn * t.cn};
}

double complete_elliptic_K(EllipticModulus k) {
  if (k.value() == 1.0) {
    throw DivergenceError("complete_elliptic_K: the quarter period diverges at k = 1");
  }
  double a = 1.0;
  double b = k.complementary();
  for (int i = 0; i < kMaxAgmSteps && std::abs(a - b) > 2.0 * std::numeric_limits<double>::epsilon() * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (a + b);
}

}  // namespace ellvne

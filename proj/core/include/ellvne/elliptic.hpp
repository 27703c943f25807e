#pragma once

/// \file elliptic.hpp
/// Jacobi elliptic functions sn, cn, dn of real argument and the complete
/// elliptic integral of the first kind.
///
/// All interfaces take the modulus k (not the parameter m = k^2). The
/// trigonometric limit k = 0 and the hyperbolic limit k = 1 are evaluated
/// from their closed forms; 0 < k < 1 uses the arithmetic-geometric mean
/// (descending Landen) scheme for the amplitude.

namespace ellvne {

/// Elliptic modulus k with 0 <= k <= 1.
class EllipticModulus {
 public:
  /// Throws DomainError when k is not finite or lies outside [0, 1].
  explicit EllipticModulus(double k);

  double value() const noexcept { return k_; }
  double squared() const noexcept { return k_ * k_; }
  /// Complementary modulus sqrt(1 - k^2), computed without cancellation.
  double complementary() const noexcept;

 private:
  double k_;
};

struct EllipticTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

struct EllipticDerivatives {
  double dsn = 0.0;
  double dcn = 0.0;
  double ddn = 0.0;
};

/// (sn(u,k), cn(u,k), dn(u,k)). Throws DomainError for non-finite u.
EllipticTriple jacobi_sncndn(double u, EllipticModulus k);

/// (cn dn, -sn dn, -k^2 sn cn). Throws DomainError if the triple violates the
/// algebraic identities by more than 1e-10.
EllipticDerivatives jacobi_derivatives(const EllipticTriple& t, EllipticModulus k);

/// Quarter period K(k). sn and cn have period 4K, dn has period 2K.
/// Throws DivergenceError for k = 1.
double complete_elliptic_K(EllipticModulus k);

/// 1 / cosh(x), returning 0 where cosh overflows.
double sech(double x);

/// Max of |sn^2 + cn^2 - 1| and |dn^2 + k^2 sn^2 - 1|.
double identity_defect(const EllipticTriple& t, EllipticModulus k);

}  // namespace ellvne

#pragma once

/// \file derivation.hpp
/// Numeric re-derivation of the Hamiltonian coefficients from the operator
/// equations obtained by inserting the Case-1 / Case-2 ansatz into the
/// nonlinear von Neumann equation and matching the independent elliptic
/// monomials.
///
/// Unknowns are the span coefficients of H[G] for each generator G and of
/// H[theta]. Every operator equation is projected on an orthonormal basis of
/// the operators it involves and the stacked system is solved by dense least
/// squares. A consistent system has a one-parameter solution family (the
/// free nu); the family member with the requested nu is reported.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ellvne/elliptic.hpp"
#include "ellvne/matrix.hpp"
#include "ellvne/operator_map.hpp"
#include "ellvne/special_solutions.hpp"

namespace ellvne {

/// Relative least-squares residual above which a system counts as inconsistent.
inline constexpr double kDerivationTol = 1e-8;

/// Named coefficients in a fixed order.
struct CoefficientTable {
  std::vector<std::string> names;
  std::vector<double> values;

  /// Throws std::out_of_range for an unknown name.
  double at(const std::string& name) const;
};

/// One operator equation  sum_j w_j i[P_j, H[Q_j]] = rhs,  with P_j a known
/// operator and Q_j an index into the source list (generators, then theta).
struct CommutatorTerm {
  double weight;
  ComplexMatrix left;
  std::size_t source;
};

struct OperatorEquation {
  std::string label;
  std::vector<CommutatorTerm> terms;
  ComplexMatrix rhs;
};

struct LinearSystemSolution {
  std::vector<double> particular;            // minimum-norm solution (real part)
  std::vector<std::vector<double>> family;   // nullspace directions (real part)
  double relative_residual = 0.0;
  double max_imag = 0.0;
  std::size_t rank = 0;
  std::size_t basis_size = 0;                // dimension of the projection basis
};

/// Solves the projected system for the coefficients c[s * targets.size() + t]
/// with H[source_s] = sum_t c[...] targets_t. Never throws on inconsistency;
/// callers inspect relative_residual.
LinearSystemSolution solve_operator_equations(const std::vector<OperatorEquation>& equations,
                                              std::size_t n_sources,
                                              const std::vector<ComplexMatrix>& targets);

/// The eight Case-1 equations for generators (A, B, X) and central theta.
std::vector<OperatorEquation> case1_equations(const HermitianOperator& a, const HermitianOperator& b,
                                              const HermitianOperator& x, const HermitianOperator& theta,
                                              double omega, EllipticModulus k);

/// The eight Case-2 equations for generators (A, C, D) and theta.
std::vector<OperatorEquation> case2_equations(const HermitianOperator& a, const HermitianOperator& c,
                                              const HermitianOperator& d, const HermitianOperator& theta,
                                              double omega, EllipticModulus k);

struct Case1Derivation {
  /// a_A b_A x_A a_B b_B x_B a_X b_X x_X a_0 b_0 x_0, at the requested nu.
  CoefficientTable coefficients;
  /// Direction of the solution family, normalised to b_B = 1.
  CoefficientTable nu_direction;
  /// Coefficients the equations force to vanish, with their magnitudes.
  CoefficientTable forced_zeros;
  double nu = 0.0;
  double alpha = 0.0;  // omega / (b_B - x_X)
  double beta = 0.0;   // omega / (a_A - b_B)
  double relative_residual = 0.0;
  double max_imag = 0.0;
  std::size_t family_dimension = 0;

  double max_forced_zero() const;
};

struct Case2Derivation {
  /// a_A c_A d_A a_C c_C d_C a_D c_D d_D a_0 c_0 d_0, at the requested nu.
  CoefficientTable coefficients;
  /// Direction of the solution family, normalised to c_C = 1.
  CoefficientTable nu_direction;
  /// a_C, a_D, c_A, d_A, c_D, d_C, c_0, a_0, d_D - c_C, t_A, t_C.
  CoefficientTable forced_zeros;
  double nu = 0.0;
  double alpha = 0.0;  // omega / (c_C t_D - d_0)
  double delta = 0.0;  // -2 omega / (c_C - a_A)
  double t_d = 0.0;
  double relative_residual = 0.0;
  double max_imag = 0.0;
  std::size_t family_dimension = 0;

  double max_forced_zero() const;
};

/// Checks Case-1 closure first (fit_case1_constants), then solves the
/// coefficient system. Throws DerivationError when the inputs violate a
/// hypothesis, when the system is inconsistent, or when the solution family is
/// not one-dimensional.
Case1Derivation derive_case1_coefficients(const HermitianOperator& a, const HermitianOperator& b,
                                          const HermitianOperator& x, const HermitianOperator& theta,
                                          double omega, EllipticModulus k, double nu = 0.0);

/// theta = theta0 + t_A A + t_C C + t_D D. Throws DerivationError as above.
Case2Derivation derive_case2_coefficients(const HermitianOperator& a, const HermitianOperator& c,
                                          const HermitianOperator& d, const HermitianOperator& theta0,
                                          const std::array<double, 3>& t_coeffs, double omega,
                                          EllipticModulus k, double nu = 0.0);

/// Hamiltonian assembled from derived coefficients (zero on the complement).
OperatorMap hamiltonian_from_derivation(const Case1Derivation& der, const HermitianOperator& a,
                                        const HermitianOperator& b, const HermitianOperator& x,
                                        const HermitianOperator& theta);
OperatorMap hamiltonian_from_derivation(const Case2Derivation& der, const HermitianOperator& a,
                                        const HermitianOperator& c, const HermitianOperator& d,
                                        const HermitianOperator& theta);

}  // namespace ellvne

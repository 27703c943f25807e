#include "ellvne/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ellvne/errors.hpp"
#include "ellvne/linalg.hpp"

namespace ellvne {

namespace {

constexpr double kBasisTol = 1e-12;
constexpr double kRankTol = 1e-9;

const std::vector<std::string> kCase1Names = {"a_A", "b_A", "x_A", "a_B", "b_B", "x_B",
                                              "a_X", "b_X", "x_X", "a_0", "b_0", "x_0"};
const std::vector<std::string> kCase2Names = {"a_A", "c_A", "d_A", "a_C", "c_C", "d_C",
                                              "a_D", "c_D", "d_D", "a_0", "c_0", "d_0"};

ComplexMatrix ic(const ComplexMatrix& p, const ComplexMatrix& q) { return kI * commutator(p, q); }

CoefficientTable make_table(const std::vector<std::string>& names, const std::vector<double>& values) {
  return {names, values};
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Picks the member of particular + s * direction whose entry `pivot` equals nu.
std::vector<double> family_member(const LinearSystemSolution& sol, std::size_t pivot, double nu,
                                  std::vector<double>& direction) {
  direction = sol.family.front();
  const double scale = direction[pivot];
  if (std::abs(scale) < 1e-12) {
    throw DerivationError("solution family does not move the nu coefficient", 0.0);
  }
  for (auto& v : direction) v /= scale;
  const double s = nu - sol.particular[pivot];
  std::vector<double> out = sol.particular;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * direction[i];
  return out;
}

void require_consistent(const LinearSystemSolution& sol, const char* which) {
  if (!(sol.relative_residual <= kDerivationTol)) {
    throw DerivationError(std::string(which) + ": coefficient equations are inconsistent (relative residual " +
                              describe(sol.relative_residual) + ")",
                          sol.relative_residual);
  }
  if (sol.family.size() != 1) {
    throw DerivationError(std::string(which) + ": solution family has dimension " +
                              std::to_string(sol.family.size()) + ", expected 1",
                          sol.relative_residual);
  }
}

double max_abs_value(const CoefficientTable& t) {
  double m = 0.0;
  for (double v : t.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double CoefficientTable::at(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw std::out_of_range("CoefficientTable: no coefficient named " + name);
}

double Case1Derivation::max_forced_zero() const { return max_abs_value(forced_zeros); }
double Case2Derivation::max_forced_zero() const { return max_abs_value(forced_zeros); }

LinearSystemSolution solve_operator_equations(const std::vector<OperatorEquation>& equations,
                                              std::size_t n_sources,
                                              const std::vector<ComplexMatrix>& targets) {
  const std::size_t n_targets = targets.size();
  const std::size_t n_unknowns = n_sources * n_targets;

  // Coefficient operator of every unknown in every equation.
  std::vector<std::vector<ComplexMatrix>> coeff_ops(equations.size());
  std::vector<ComplexMatrix> all_ops;
  for (std::size_t e = 0; e < equations.size(); ++e) {
    const auto& eq = equations[e];
    const std::size_t d = eq.rhs.rows();
    coeff_ops[e].assign(n_unknowns, ComplexMatrix(d));
    for (const auto& term : eq.terms) {
      for (std::size_t t = 0; t < n_targets; ++t) {
        coeff_ops[e][term.source * n_targets + t] += Complex(term.weight) * ic(term.left, targets[t]);
      }
    }
    for (const auto& op : coeff_ops[e])
      if (op.frobenius_norm() > 0.0) all_ops.push_back(op);
    if (eq.rhs.frobenius_norm() > 0.0) all_ops.push_back(eq.rhs);
  }

  LinearSystemSolution out;
  if (all_ops.empty()) {
    out.particular.assign(n_unknowns, 0.0);
    for (std::size_t u = 0; u < n_unknowns; ++u) {
      std::vector<double> dir(n_unknowns, 0.0);
      dir[u] = 1.0;
      out.family.push_back(std::move(dir));
    }
    return out;
  }

  const ComplexMatrix basis = linalg::orthonormal_range(linalg::stack_columns(all_ops), kBasisTol);
  const std::size_t r = basis.cols();
  out.basis_size = r;

  auto project = [&](const ComplexMatrix& op, std::size_t j) {
    Complex s = 0.0;
    const auto v = op.data();
    for (std::size_t k = 0; k < v.size(); ++k) s += std::conj(basis(k, j)) * v[k];
    return s;
  };

  ComplexMatrix m(equations.size() * r, n_unknowns);
  std::vector<Complex> b(equations.size() * r);
  for (std::size_t e = 0; e < equations.size(); ++e) {
    for (std::size_t j = 0; j < r; ++j) {
      const std::size_t row = e * r + j;
      b[row] = project(equations[e].rhs, j);
      for (std::size_t u = 0; u < n_unknowns; ++u) m(row, u) = project(coeff_ops[e][u], j);
    }
  }

  const auto ls = linalg::solve_least_squares(m, b, kRankTol);
  out.rank = ls.rank;
  // Scale the residual by the system size when the right-hand side vanishes.
  double matrix_scale = 0.0;
  for (const auto& z : m.data()) matrix_scale = std::max(matrix_scale, std::abs(z));
  const double denom = ls.rhs_norm > 0.0 ? ls.rhs_norm : std::max(matrix_scale, 1.0);
  out.relative_residual = ls.residual / denom;
  for (const auto& z : ls.solution) {
    out.particular.push_back(z.real());
    out.max_imag = std::max(out.max_imag, std::abs(z.imag()));
  }
  for (const auto& n : ls.nullspace) {
    // Rotate the complex null vector to make its largest entry real.
    std::size_t big = 0;
    for (std::size_t k = 1; k < n.size(); ++k)
      if (std::abs(n[k]) > std::abs(n[big])) big = k;
    const Complex phase = std::abs(n[big]) > 0.0 ? std::conj(n[big]) / std::abs(n[big]) : Complex(1.0);
    std::vector<double> dir;
    for (const auto& z : n) dir.push_back((z * phase).real());
    out.family.push_back(std::move(dir));
  }
  return out;
}

std::vector<OperatorEquation> case1_equations(const HermitianOperator& a, const HermitianOperator& b,
                                              const HermitianOperator& x, const HermitianOperator& theta,
                                              double omega, EllipticModulus k) {
  // Sources: 0 = A, 1 = B, 2 = X, 3 = theta. Written with i[H[Q], P] = -i[P, H[Q]].
  const std::size_t d = a.dim();
  const double k2 = k.squared();
  const ComplexMatrix& am = a.matrix();
  const ComplexMatrix& bm = b.matrix();
  const ComplexMatrix& xm = x.matrix();
  (void)theta;
  const ComplexMatrix zero(d);
  return {
      {"0 = i[H[A],A] + i[H[X],X]", {{-1.0, am, 0}, {-1.0, xm, 2}}, zero},
      {"0 = -i[H[A],A] + i[H[B],B] - k^2 i[H[X],X]", {{1.0, am, 0}, {-1.0, bm, 1}, {k2, xm, 2}}, zero},
      {"0 = i[H[theta],A]", {{-1.0, am, 3}}, zero},
      {"0 = i[H[theta],B]", {{-1.0, bm, 3}}, zero},
      {"0 = i[H[theta],X]", {{-1.0, xm, 3}}, zero},
      {"omega A = i[H[B],X] + i[H[X],B]", {{-1.0, xm, 1}, {-1.0, bm, 2}}, Complex(omega) * am},
      {"-omega B = i[H[A],X] + i[H[X],A]", {{-1.0, xm, 0}, {-1.0, am, 2}}, Complex(-omega) * bm},
      {"k^2 omega X = i[H[A],B] + i[H[B],A]", {{-1.0, bm, 0}, {-1.0, am, 1}}, Complex(k2 * omega) * xm},
  };
}

std::vector<OperatorEquation> case2_equations(const HermitianOperator& a, const HermitianOperator& c,
                                              const HermitianOperator& d, const HermitianOperator& theta,
                                              double omega, EllipticModulus k) {
  // Sources: 0 = A, 1 = C, 2 = D, 3 = theta.
  const std::size_t dim = a.dim();
  const double k2 = k.squared();
  const ComplexMatrix& am = a.matrix();
  const ComplexMatrix& cm = c.matrix();
  const ComplexMatrix& dm = d.matrix();
  const ComplexMatrix& tm = theta.matrix();
  const ComplexMatrix zero(dim);
  return {
      {"0 = i[D,H[D]] - k^2 i[C,H[C]]", {{1.0, dm, 2}, {-k2, cm, 1}}, zero},
      {"0 = i[theta,H[theta]] + (1-k^2) i[C,H[C]]", {{1.0, tm, 3}, {1.0 - k2, cm, 1}}, zero},
      {"0 = i[theta,H[D]] + i[D,H[theta]] + i[A,H[A]] + (2k^2-1) i[C,H[C]]",
       {{1.0, tm, 2}, {1.0, dm, 3}, {1.0, am, 0}, {2.0 * k2 - 1.0, cm, 1}},
       zero},
      {"0 = i[C,H[D]] + i[D,H[C]]", {{1.0, cm, 2}, {1.0, dm, 1}}, zero},
      {"-omega A = i[theta,H[C]] + i[C,H[theta]]", {{1.0, tm, 1}, {1.0, cm, 3}}, Complex(-omega) * am},
      {"2k^2 omega C = i[A,H[D]] + i[D,H[A]]", {{1.0, am, 2}, {1.0, dm, 0}}, Complex(2.0 * k2 * omega) * cm},
      {"omega C = i[theta,H[A]] + i[A,H[theta]] + i[A,H[D]] + i[D,H[A]]",
       {{1.0, tm, 0}, {1.0, am, 3}, {1.0, am, 2}, {1.0, dm, 0}},
       Complex(omega) * cm},
      {"-2 omega D = i[A,H[C]] + i[C,H[A]]", {{1.0, am, 1}, {1.0, cm, 0}}, Complex(-2.0 * omega) * dm},
  };
}

Case1Derivation derive_case1_coefficients(const HermitianOperator& a, const HermitianOperator& b,
                                          const HermitianOperator& x, const HermitianOperator& theta,
                                          double omega, EllipticModulus k, double nu) {
  if (omega == 0.0 || !std::isfinite(omega)) throw DomainError("derive_case1_coefficients: omega must be nonzero");
  if (theta.dim() != a.dim()) throw DimensionMismatch("derive_case1_coefficients: theta dimension");
  try {
    (void)fit_case1_constants(a, b, x, k);
  } catch (const ClosureError& e) {
    throw DerivationError(std::string("inputs violate the Case-1 hypotheses: ") + e.what(), e.residual());
  } catch (const DegenerateConstantsError& e) {
    throw DerivationError(std::string("inputs violate the Case-1 hypotheses: ") + e.what(), 0.0);
  }
  const double defect = commutation_defect(theta, {a, b, x});
  if (defect > kClosureTol) {
    throw DerivationError("theta does not commute with A, B, X", defect);
  }

  const auto sol = solve_operator_equations(case1_equations(a, b, x, theta, omega, k), 4,
                                            {a.matrix(), b.matrix(), x.matrix()});
  require_consistent(sol, "derive_case1_coefficients");

  Case1Derivation out;
  std::vector<double> direction;
  const std::vector<double> coeffs = family_member(sol, 4, nu, direction);
  out.coefficients = make_table(kCase1Names, coeffs);
  out.nu_direction = make_table(kCase1Names, direction);
  out.nu = nu;
  out.relative_residual = sol.relative_residual;
  out.max_imag = sol.max_imag;
  out.family_dimension = sol.family.size();

  const auto& c = out.coefficients;
  std::vector<std::string> zero_names = {"a_B", "a_X", "b_A", "b_X", "x_A", "x_B", "a_0", "b_0", "x_0"};
  std::vector<double> zero_values;
  for (const auto& n : zero_names) zero_values.push_back(std::abs(c.at(n)));
  out.forced_zeros = make_table(zero_names, zero_values);

  const double bx = c.at("b_B") - c.at("x_X");
  const double ab = c.at("a_A") - c.at("b_B");
  if (bx == 0.0 || ab == 0.0) throw DerivationError("derived coefficients give a vanishing denominator", 0.0);
  out.alpha = omega / bx;
  out.beta = omega / ab;
  return out;
}

Case2Derivation derive_case2_coefficients(const HermitianOperator& a, const HermitianOperator& c,
                                          const HermitianOperator& d, const HermitianOperator& theta0,
                                          const std::array<double, 3>& t_coeffs, double omega,
                                          EllipticModulus k, double nu) {
  if (omega == 0.0 || !std::isfinite(omega)) throw DomainError("derive_case2_coefficients: omega must be nonzero");
  if (theta0.dim() != a.dim()) throw DimensionMismatch("derive_case2_coefficients: theta0 dimension");
  try {
    (void)fit_case2_constants(a, c, d, k);
  } catch (const ClosureError& e) {
    throw DerivationError(std::string("inputs violate the Case-2 hypotheses: ") + e.what(), e.residual());
  }
  const double defect = commutation_defect(theta0, {a, c, d});
  if (defect > kClosureTol) throw DerivationError("theta0 does not commute with A, C, D", defect);

  const HermitianOperator theta(theta0.matrix() + Complex(t_coeffs[0]) * a.matrix() +
                                Complex(t_coeffs[1]) * c.matrix() + Complex(t_coeffs[2]) * d.matrix());
  const auto sol = solve_operator_equations(case2_equations(a, c, d, theta, omega, k), 4,
                                            {a.matrix(), c.matrix(), d.matrix()});
  require_consistent(sol, "derive_case2_coefficients");

  Case2Derivation out;
  std::vector<double> direction;
  const std::vector<double> coeffs = family_member(sol, 4, nu, direction);
  out.coefficients = make_table(kCase2Names, coeffs);
  out.nu_direction = make_table(kCase2Names, direction);
  out.nu = nu;
  out.t_d = t_coeffs[2];
  out.relative_residual = sol.relative_residual;
  out.max_imag = sol.max_imag;
  out.family_dimension = sol.family.size();

  const auto& t = out.coefficients;
  std::vector<std::string> zero_names = {"a_C", "a_D", "c_A", "d_A", "c_D", "d_C",
                                         "c_0", "a_0", "d_D - c_C", "t_A", "t_C"};
  std::vector<double> zero_values = {
      std::abs(t.at("a_C")), std::abs(t.at("a_D")), std::abs(t.at("c_A")), std::abs(t.at("d_A")),
      std::abs(t.at("c_D")), std::abs(t.at("d_C")), std::abs(t.at("c_0")), std::abs(t.at("a_0")),
      std::abs(t.at("d_D") - t.at("c_C")), std::abs(t_coeffs[0]), std::abs(t_coeffs[1])};
  out.forced_zeros = make_table(zero_names, zero_values);

  const double ca = t.at("c_C") - t.at("a_A");
  const double cd = t.at("c_C") * t_coeffs[2] - t.at("d_0");
  if (ca == 0.0 || cd == 0.0) throw DerivationError("derived coefficients give a vanishing denominator", 0.0);
  out.delta = -2.0 * omega / ca;
  out.alpha = omega / cd;
  return out;
}

namespace {

OperatorMap map_from_table(const std::vector<double>& v, const std::vector<const HermitianOperator*>& gens,
                           const HermitianOperator& theta) {
  const std::size_t d = theta.dim();
  auto image = [&](std::size_t source) {
    ComplexMatrix m(d);
    for (std::size_t t = 0; t < 3; ++t) m += Complex(v[source * 3 + t]) * gens[t]->matrix();
    return m;
  };
  std::vector<GeneratorImage> pairs;
  if (theta.matrix().frobenius_norm() > 0.0) pairs.push_back({theta.matrix(), image(3)});
  for (std::size_t s = 0; s < 3; ++s) pairs.push_back({gens[s]->matrix(), image(s)});
  return operator_map_from_action(d, pairs);
}

}  // namespace

OperatorMap hamiltonian_from_derivation(const Case1Derivation& der, const HermitianOperator& a,
                                        const HermitianOperator& b, const HermitianOperator& x,
                                        const HermitianOperator& theta) {
  return map_from_table(der.coefficients.values, {&a, &b, &x}, theta);
}

OperatorMap hamiltonian_from_derivation(const Case2Derivation& der, const HermitianOperator& a,
                                        const HermitianOperator& c, const HermitianOperator& d,
                                        const HermitianOperator& theta) {
  return map_from_table(der.coefficients.values, {&a, &c, &d}, theta);
}

}  // namespace ellvne

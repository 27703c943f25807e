#include "ellvne/special_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ellvne/errors.hpp"
#include "ellvne/linalg.hpp"

namespace ellvne {

namespace {

double norm(const ComplexMatrix& m) { return m.frobenius_norm(); }

// Real projection coefficient <target, v> / <target, target>.
double project(const ComplexMatrix& v, const ComplexMatrix& target) {
  return frobenius_inner(target, v).real() / frobenius_inner(target, target).real();
}

void require_same_dim(std::initializer_list<const HermitianOperator*> ops, const char* where) {
  const std::size_t d = (*ops.begin())->dim();
  for (const auto* op : ops) {
    if (op->dim() != d) throw DimensionMismatch(std::string(where) + ": operator dimensions differ");
  }
}

void require_independent(const std::vector<HermitianOperator>& ops, const char* where) {
  std::vector<ComplexMatrix> cols;
  for (const auto& op : ops) cols.push_back(op.matrix());
  const double rel = linalg::relative_min_singular_value(linalg::stack_columns(cols));
  if (!(rel > kIndependenceTol)) {
    std::ostringstream os;
    os << where << ": operators are not linearly independent (relative smallest singular value "
       << rel << ")";
    throw LinearDependenceError(os.str());
  }
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_relation(const std::string& name, double residual) {
  if (!(residual <= kClosureTol)) {
    throw ClosureError(name, residual,
                       "closure relation " + name + " fails: relative residual " + fmt_double(residual));
  }
}

void require_nonzero(double v, const char* what) {
  if (v == 0.0 || !std::isfinite(v)) throw DomainError(std::string(what) + " must be finite and nonzero");
}

}  // namespace

std::string to_string(CaseTag tag) { return tag == CaseTag::Case1 ? "case1" : "case2"; }

double commutation_defect(const HermitianOperator& theta, const std::vector<HermitianOperator>& ops) {
  const double tn = norm(theta.matrix());
  if (tn == 0.0) return 0.0;
  double defect = 0.0;
  for (const auto& op : ops) {
    const double on = norm(op.matrix());
    if (on == 0.0) continue;
    defect = std::max(defect, norm(commutator(theta.matrix(), op.matrix())) / (tn * on));
  }
  return defect;
}

StructureConstants fit_case1_constants(const HermitianOperator& a, const HermitianOperator& b,
                                       const HermitianOperator& x, EllipticModulus k) {
  require_same_dim({&a, &b, &x}, "fit_case1_constants");
  require_independent({a, b, x}, "fit_case1_constants");
  if (k.value() == 0.0) throw DomainError("fit_case1_constants: k must be positive");

  const ComplexMatrix kbx = commutator_i(b, x).matrix();
  const ComplexMatrix kab = commutator_i(a, b).matrix();
  const ComplexMatrix kax = commutator_i(a, x).matrix();

  StructureConstants sc;
  sc.tag = CaseTag::Case1;
  sc.alpha = project(kbx, a.matrix());
  sc.second = project(kab, x.matrix()) / k.squared();
  sc.relation_residuals[0] = norm(kbx - Complex(sc.alpha) * a.matrix()) / (norm(b) * norm(x));
  sc.relation_residuals[1] =
      norm(kab - Complex(k.squared() * sc.second) * x.matrix()) / (norm(a) * norm(b));
  check_relation("i[B,X] = alpha A", sc.relation_residuals[0]);
  check_relation("i[A,B] = k^2 beta X", sc.relation_residuals[1]);

  const double sum = sc.alpha + sc.second;
  if (std::abs(sum) <= 1e-12 * std::max({1.0, std::abs(sc.alpha), std::abs(sc.second)})) {
    throw DegenerateConstantsError("fit_case1_constants: alpha + beta = 0, the third relation is undefined");
  }
  const double gamma = -sc.alpha * sc.second / sum;
  sc.relation_residuals[2] = norm(kax - Complex(gamma) * b.matrix()) / (norm(a) * norm(x));
  check_relation("i[A,X] = -alpha beta/(alpha+beta) B", sc.relation_residuals[2]);
  sc.fit_residual = *std::max_element(sc.relation_residuals.begin(), sc.relation_residuals.end());
  return sc;
}

StructureConstants fit_case2_constants(const HermitianOperator& a, const HermitianOperator& c,
                                       const HermitianOperator& d, EllipticModulus k) {
  require_same_dim({&a, &c, &d}, "fit_case2_constants");
  require_independent({a, c, d}, "fit_case2_constants");
  if (k.value() == 0.0) throw DomainError("fit_case2_constants: k must be positive");

  const ComplexMatrix kcd = commutator_i(c, d).matrix();
  const ComplexMatrix kac = commutator_i(a, c).matrix();
  const ComplexMatrix kad = commutator_i(a, d).matrix();

  StructureConstants sc;
  sc.tag = CaseTag::Case2;
  sc.alpha = project(kcd, a.matrix());
  sc.second = project(kac, d.matrix());
  sc.relation_residuals[0] = norm(kcd - Complex(sc.alpha) * a.matrix()) / (norm(c) * norm(d));
  sc.relation_residuals[1] = norm(kac - Complex(sc.second) * d.matrix()) / (norm(a) * norm(c));
  sc.relation_residuals[2] =
      norm(kad + Complex(k.squared() * sc.second) * c.matrix()) / (norm(a) * norm(d));
  check_relation("i[C,D] = alpha A", sc.relation_residuals[0]);
  check_relation("i[A,C] = delta D", sc.relation_residuals[1]);
  check_relation("i[A,D] = -k^2 delta C", sc.relation_residuals[2]);
  sc.fit_residual = *std::max_element(sc.relation_residuals.begin(), sc.relation_residuals.end());
  return sc;
}

SpanDecomposition decompose_in_span(const ComplexMatrix& v, const std::vector<HermitianOperator>& ops) {
  std::vector<ComplexMatrix> cols;
  for (const auto& op : ops) cols.push_back(op.matrix());
  const ComplexMatrix m = linalg::stack_columns(cols);
  const auto ls = linalg::solve_least_squares(m, vectorize(v), kIndependenceTol);
  SpanDecomposition out;
  for (const auto& z : ls.solution) {
    out.coefficients.push_back(z.real());
    out.max_imag = std::max(out.max_imag, std::abs(z.imag()));
  }
  out.residual = ls.rhs_norm == 0.0 ? 0.0 : ls.residual / ls.rhs_norm;
  return out;
}

// ---------------------------------------------------------------------------
// Case 1

Case1System::Case1System(HermitianOperator theta, HermitianOperator a, HermitianOperator b,
                         HermitianOperator x, double omega, EllipticModulus k, double nu,
                         StructureConstants constants)
    : theta_(std::move(theta)), a_(std::move(a)), b_(std::move(b)), x_(std::move(x)), omega_(omega),
      k_(k), nu_(nu), constants_(constants) {}

Case1System Case1System::create(HermitianOperator theta, HermitianOperator a, HermitianOperator b,
                                HermitianOperator x, double omega, EllipticModulus k, double nu) {
  require_same_dim({&theta, &a, &b, &x}, "Case1System");
  require_nonzero(omega, "Case1System: omega");
  if (!std::isfinite(nu)) throw DomainError("Case1System: nu must be finite");
  const double defect = commutation_defect(theta, {a, b, x});
  if (defect > kExactTol) {
    throw ClosureError("[theta, .] = 0", defect,
                       "Case1System: theta does not commute with A, B, X (defect " + fmt_double(defect) + ")");
  }
  StructureConstants sc = fit_case1_constants(a, b, x, k);
  return Case1System(std::move(theta), std::move(a), std::move(b), std::move(x), omega, k, nu, sc);
}

Case1System Case1System::with_nu(double nu) const {
  Case1System copy = *this;
  copy.nu_ = nu;
  return copy;
}

HermitianOperator case1_state(const Case1System& sys, double t) {
  const auto e = jacobi_sncndn(sys.omega() * t, sys.k());
  ComplexMatrix rho = sys.theta().matrix();
  rho += Complex(e.cn) * sys.a().matrix();
  rho += Complex(e.sn) * sys.b().matrix();
  rho += Complex(e.dn) * sys.x().matrix();
  return HermitianOperator(std::move(rho));
}

HermitianOperator case1_state_derivative(const Case1System& sys, double t) {
  const auto e = jacobi_sncndn(sys.omega() * t, sys.k());
  const auto de = jacobi_derivatives(e, sys.k());
  ComplexMatrix r = Complex(de.dcn) * sys.a().matrix();
  r += Complex(de.dsn) * sys.b().matrix();
  r += Complex(de.ddn) * sys.x().matrix();
  r *= sys.omega();
  return HermitianOperator(std::move(r));
}

namespace {

std::vector<GeneratorImage> with_optional_theta(const HermitianOperator& theta, ComplexMatrix theta_image,
                                                std::vector<GeneratorImage> pairs) {
  // A vanishing theta carries no independent information about H.
  if (theta.matrix().frobenius_norm() > 0.0) {
    pairs.insert(pairs.begin(), {theta.matrix(), std::move(theta_image)});
  }
  return pairs;
}

}  // namespace

OperatorMap case1_hamiltonian(const Case1System& sys) {
  if (sys.alpha() == 0.0 || sys.beta() == 0.0) {
    throw DegenerateConstantsError("case1_hamiltonian: alpha = " + fmt_double(sys.alpha()) +
                                   ", beta = " + fmt_double(sys.beta()) + "; omega/alpha or omega/beta undefined");
  }
  const double nu = sys.nu();
  const double w = sys.omega();
  std::vector<GeneratorImage> pairs{
      {sys.a().matrix(), Complex(nu + w / sys.beta()) * sys.a().matrix()},
      {sys.b().matrix(), Complex(nu) * sys.b().matrix()},
      {sys.x().matrix(), Complex(nu - w / sys.alpha()) * sys.x().matrix()},
  };
  return operator_map_from_action(sys.dim(),
                                  with_optional_theta(sys.theta(), ComplexMatrix(sys.dim()), std::move(pairs)));
}

// ---------------------------------------------------------------------------
// Case 2

double case2_theta_shift(double alpha, double delta, EllipticModulus k) {
  if (k.value() == 0.0) throw DomainError("case2_theta_shift: k must be positive");
  if (alpha == 0.0) throw DegenerateConstantsError("case2_theta_shift: alpha = 0");
  return (1.0 - 2.0 * k.squared()) / (2.0 * k.squared()) - delta / (2.0 * alpha);
}

Case2System::Case2System(HermitianOperator theta0, HermitianOperator theta, HermitianOperator a,
                         HermitianOperator c, HermitianOperator d, double omega, EllipticModulus k,
                         double nu, StructureConstants constants, std::array<double, 3> t_coeffs)
    : theta0_(std::move(theta0)), theta_(std::move(theta)), a_(std::move(a)), c_(std::move(c)),
      d_(std::move(d)), omega_(omega), k_(k), nu_(nu), constants_(constants), t_coeffs_(t_coeffs) {}

Case2System Case2System::create(HermitianOperator theta0, HermitianOperator a, HermitianOperator c,
                                HermitianOperator d, double omega, EllipticModulus k, double nu) {
  require_same_dim({&theta0, &a, &c, &d}, "Case2System");
  require_nonzero(omega, "Case2System: omega");
  if (!std::isfinite(nu)) throw DomainError("Case2System: nu must be finite");
  const double defect = commutation_defect(theta0, {a, c, d});
  if (defect > kExactTol) {
    throw ClosureError("[theta0, .] = 0", defect,
                       "Case2System: theta0 does not commute with A, C, D (defect " + fmt_double(defect) + ")");
  }
  StructureConstants sc = fit_case2_constants(a, c, d, k);
  if (sc.alpha == 0.0 || sc.delta() == 0.0) {
    throw DegenerateConstantsError("Case2System: alpha and delta must be nonzero");
  }
  const double t_d = case2_theta_shift(sc.alpha, sc.delta(), k);
  HermitianOperator theta(theta0.matrix() + Complex(t_d) * d.matrix());
  require_independent({theta, a, c, d}, "Case2System");
  return Case2System(std::move(theta0), std::move(theta), std::move(a), std::move(c), std::move(d), omega,
                     k, nu, sc, {0.0, 0.0, t_d});
}

Case2System Case2System::from_theta(HermitianOperator theta, HermitianOperator theta0, HermitianOperator a,
                                    HermitianOperator c, HermitianOperator d, double omega,
                                    EllipticModulus k, double nu) {
  require_same_dim({&theta, &theta0}, "Case2System::from_theta");
  Case2System sys = create(std::move(theta0), a, c, d, omega, k, nu);
  const auto dec = decompose_in_span(theta.matrix() - sys.theta0().matrix(), {a, c, d});
  const double scale = std::max(1.0, theta.matrix().frobenius_norm());
  if (dec.residual > kClosureTol) {
    throw ClosureError("theta - theta0 in span{A,C,D}", dec.residual,
                       "Case2System: theta - theta0 is not in span{A, C, D}");
  }
  const double t_d = sys.t_coeffs_[2];
  const double mismatch = std::max({std::abs(dec.coefficients[0]), std::abs(dec.coefficients[1]),
                                    std::abs(dec.coefficients[2] - t_d)});
  if (mismatch > kClosureTol * scale) {
    throw ClosureError("theta0 = theta - t_D D", mismatch,
                       "Case2System: theta decomposition (t_A, t_C, t_D) = (" + fmt_double(dec.coefficients[0]) +
                           ", " + fmt_double(dec.coefficients[1]) + ", " + fmt_double(dec.coefficients[2]) +
                           ") violates t_A = t_C = 0, t_D = " + fmt_double(t_d));
  }
  sys.theta_ = std::move(theta);
  return sys;
}

Case2System Case2System::with_nu(double nu) const {
  Case2System copy = *this;
  copy.nu_ = nu;
  return copy;
}

HermitianOperator case2_state(const Case2System& sys, double t) {
  const auto e = jacobi_sncndn(sys.omega() * t, sys.k());
  ComplexMatrix rho = sys.theta().matrix();
  rho += Complex(e.cn) * sys.a().matrix();
  rho += Complex(e.sn * e.dn) * sys.c().matrix();
  rho += Complex(e.cn * e.cn) * sys.d().matrix();
  return HermitianOperator(std::move(rho));
}

HermitianOperator case2_state_derivative(const Case2System& sys, double t) {
  const auto e = jacobi_sncndn(sys.omega() * t, sys.k());
  const double k2 = sys.k().squared();
  ComplexMatrix r = Complex(-e.sn * e.dn) * sys.a().matrix();
  r += Complex(e.cn * (e.dn * e.dn - k2 * e.sn * e.sn)) * sys.c().matrix();
  r += Complex(-2.0 * e.sn * e.cn * e.dn) * sys.d().matrix();
  r *= sys.omega();
  return HermitianOperator(std::move(r));
}

double case2_theta_image_coefficient(const Case2System& sys) {
  return -sys.omega() / sys.alpha() + sys.nu() * sys.t_coeffs()[2];
}

double case2_theta_image_coefficient_as_printed(const Case2System& sys) {
  const double k2 = sys.k().squared();
  return -sys.omega() / sys.alpha() + (1.0 - 2.0 * k2) / (2.0 * k2) * sys.nu() * sys.alpha() +
         0.5 * sys.delta() * sys.nu();
}

OperatorMap case2_hamiltonian_with_theta_image(const Case2System& sys, const ComplexMatrix& theta_image) {
  if (sys.alpha() == 0.0 || sys.delta() == 0.0) {
    throw DegenerateConstantsError("case2_hamiltonian: alpha and delta must be nonzero");
  }
  const double nu = sys.nu();
  std::vector<GeneratorImage> pairs{
      {sys.theta().matrix(), theta_image},
      {sys.a().matrix(), Complex(nu + 2.0 * sys.omega() / sys.delta()) * sys.a().matrix()},
      {sys.c().matrix(), Complex(nu) * sys.c().matrix()},
      {sys.d().matrix(), Complex(nu) * sys.d().matrix()},
  };
  return operator_map_from_action(sys.dim(), pairs);
}

OperatorMap case2_hamiltonian(const Case2System& sys) {
  if (sys.alpha() == 0.0 || sys.delta() == 0.0) {
    throw DegenerateConstantsError("case2_hamiltonian: alpha and delta must be nonzero");
  }
  return case2_hamiltonian_with_theta_image(sys, Complex(case2_theta_image_coefficient(sys)) * sys.d().matrix());
}

// ---------------------------------------------------------------------------

AnalyticPath analytic_path(const Case1System& sys) {
  return {[sys](double t) { return case1_state(sys, t).matrix(); },
          [sys](double t) { return case1_state_derivative(sys, t).matrix(); }};
}

AnalyticPath analytic_path(const Case2System& sys) {
  return {[sys](double t) { return case2_state(sys, t).matrix(); },
          [sys](double t) { return case2_state_derivative(sys, t).matrix(); }};
}

double vne_residual(const AnalyticPath& path, const OperatorMap& h, double t) {
  const ComplexMatrix rho = path.state(t);
  const ComplexMatrix hr = h.apply(rho);
  return (path.derivative(t) + kI * commutator(hr, rho)).frobenius_norm();
}

double max_vne_residual(const AnalyticPath& path, const OperatorMap& h, std::span<const double> times) {
  double worst = 0.0;
  for (double t : times) worst = std::max(worst, vne_residual(path, h, t));
  return worst;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  if (n < 2) throw DomainError("uniform_grid: need at least two points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = t1;
  return g;
}

}  // namespace ellvne

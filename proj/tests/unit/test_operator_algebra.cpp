#include <cmath>
#include <random>

#include "doctest.h"
#include "ellvne/errors.hpp"
#include "ellvne/linalg.hpp"
#include "ellvne/matrix.hpp"
#include "ellvne/operator_map.hpp"
#include "ellvne/scenarios.hpp"
#include "oracles.hpp"

using namespace ellvne;

namespace {

constexpr Complex kI1{0.0, 1.0};

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return frobenius_distance(a, b); }

}  // namespace

TEST_CASE("Hermitian operators are validated, never repaired") {
  ComplexMatrix m{{1.0, {0.0, 1.0}}, {{0.0, -1.0}, 2.0}};
  CHECK_NOTHROW(HermitianOperator{m});
  m(0, 1) += 1e-6;
  CHECK_THROWS_AS(HermitianOperator{m}, NonHermitianError);
  CHECK_THROWS_AS(HermitianOperator(ComplexMatrix(2, 3)), DimensionMismatch);
  ComplexMatrix bad(2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermitianOperator{bad}, DomainError);
}

TEST_CASE("commutator_i") {
  const auto s1 = pauli(1);
  CHECK(commutator_i(s1, s1).matrix().max_abs() == 0.0);
  // i[s1, s2] = i (2 i s3) = -2 s3
  CHECK(dist(commutator_i(pauli(1), pauli(2)), Complex(-2.0) * pauli(3).matrix()) < 1e-15);
  CHECK_THROWS_AS(commutator_i(pauli(1), HermitianOperator::identity(3)), DimensionMismatch);

  const auto mb = maxwell_bloch(1.0, 1.0);
  CHECK(dist(commutator_i(mb.system.a(), mb.system.c()), -1.0 * mb.system.d()) < 1e-15);

  const auto fam = d3_known(0.5, 1.0, 0.0, 1.0, 2.0);
  CHECK(dist(commutator_i(fam.system.b(), fam.system.x()), fam.system.a()) < 1e-14);
}

TEST_CASE("anticommutator") {
  std::mt19937_64 rng(7);
  const HermitianOperator b(oracle::random_hermitian(3, rng));
  CHECK(dist(anticommutator(HermitianOperator::identity(3), b), Complex(2.0) * b.matrix()) < 1e-15);
  CHECK(anticommutator(pauli(1), pauli(2)).matrix().max_abs() == 0.0);
  const std::array<double, 3> h{1.0, 2.0, 3.0};
  const ComplexMatrix h0 = ComplexMatrix::diagonal(h);
  const ComplexMatrix e13 = ComplexMatrix::unit(3, 0, 2);
  const ComplexMatrix r = anticommutator(h0, e13);
  CHECK(r(0, 2) == Complex(4.0));
  CHECK(frobenius_distance(r, Complex(4.0) * e13) == 0.0);
}

TEST_CASE("Hermitian results of Hermitian inputs") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 20; ++n) {
    const ComplexMatrix a = oracle::random_hermitian(4, rng);
    const ComplexMatrix b = oracle::random_hermitian(4, rng);
    CHECK((kI1 * commutator(a, b)).hermiticity_defect() <= 1e-13);
    CHECK(anticommutator(a, b).hermiticity_defect() <= 1e-13);
  }
}

TEST_CASE("Jacobi identity for the scenario triples") {
  auto jacobi = [](const HermitianOperator& a, const HermitianOperator& c, const HermitianOperator& d) {
    const ComplexMatrix lhs = commutator_i(a, commutator_i(c, d)).matrix() -
                              commutator_i(c, commutator_i(a, d)).matrix() +
                              commutator_i(d, commutator_i(a, c)).matrix();
    return lhs.max_abs();
  };
  const auto mb = maxwell_bloch(1.3, 0.4);
  CHECK(jacobi(mb.system.a(), mb.system.c(), mb.system.d()) <= 1e-12);
  const auto tl = three_level(0.5, 2.0, 1.0, 0.4, 1.0);
  CHECK(jacobi(tl.system.a(), tl.system.c(), tl.system.d()) <= 1e-12);
  const auto fam = d3_known(0.5, 1.0, 0.3, 1.0, 2.0);
  CHECK(jacobi(fam.system.a(), fam.system.b(), fam.system.x()) <= 1e-12);
  const auto var = d3_variation(1.5, 1.0, 0.2, 0.7);
  CHECK(jacobi(var.system.a(), var.system.b(), var.system.x()) <= 1e-12);
}

TEST_CASE("hermitian_spectrum") {
  const std::array<double, 3> dv{3.0, 1.0, 2.0};
  const auto s = hermitian_spectrum(HermitianOperator(ComplexMatrix::diagonal(dv)));
  CHECK(s.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});

  const auto mb = maxwell_bloch(1.0, 1.0);
  const auto sp = hermitian_spectrum(case2_state(mb.system, 0.0));
  CHECK(std::abs(sp.eigenvalues[0]) < 1e-14);
  CHECK(std::abs(sp.eigenvalues[1] - 1.0) < 1e-14);

  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const ComplexMatrix a = oracle::random_hermitian(3, rng);
    const auto ev = hermitian_spectrum(HermitianOperator(a)).eigenvalues;
    const auto ref = oracle::hermitian3_eigenvalues(a);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(ev[j] - ref[j]) < 1e-9);
  }
  CHECK_THROWS_AS(hermitian_eigen(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}}), NonHermitianError);
}

TEST_CASE("eigenvector residuals") {
  std::mt19937_64 rng(5);
  for (std::size_t d : {1u, 2u, 5u, 8u}) {
    const ComplexMatrix a = oracle::random_hermitian(d, rng);
    const auto eig = hermitian_eigen(a);
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix v(d, 1);
      for (std::size_t i = 0; i < d; ++i) v(i, 0) = eig.eigenvectors(i, j);
      CHECK((a * v - Complex(eig.eigenvalues[j]) * v).frobenius_norm() <= 1e-10 * a.frobenius_norm());
    }
    double trace = 0.0;
    for (double l : eig.eigenvalues) trace += l;
    CHECK(std::abs(trace - a.trace().real()) < 1e-10);
  }
}

TEST_CASE("conjugate_by_exponential") {
  std::mt19937_64 rng(9);
  const HermitianOperator a(oracle::random_hermitian(3, rng));
  const HermitianOperator h(oracle::random_hermitian(3, rng));
  CHECK(dist(conjugate_by_exponential(a, h, 0.0), a) < 1e-14);
  CHECK(dist(conjugate_by_exponential(a, HermitianOperator::identity(3), 2.7), a) < 1e-13);
  const auto c = conjugate_by_exponential(a, h, 1.9);
  CHECK(std::abs(c.trace() - a.trace()) <= 1e-12);
  const auto sa = hermitian_spectrum(a).eigenvalues;
  const auto sc = hermitian_spectrum(c).eigenvalues;
  for (int j = 0; j < 3; ++j) CHECK(std::abs(sa[j] - sc[j]) <= 1e-10);

  const auto tl = three_level(0.5, 2.0, 1.0, 0.3, 1.0);
  const double mu = 1.3;
  const double t = 0.77;
  const auto rotated = conjugate_by_exponential(tl.system.a(), mu * level_projector3(), t);
  // (e^{i mu t P3} A e^{-i mu t P3})_{ij} = A_ij e^{i mu t (p_i - p_j)}
  const std::array<double, 3> p{0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const Complex expect = tl.system.a().matrix()(i, j) * std::polar(1.0, mu * t * (p[i] - p[j]));
      CHECK(std::abs(rotated.matrix()(i, j) - expect) < 1e-14);
    }
  }
}

TEST_CASE("unitary exponential is unitary") {
  std::mt19937_64 rng(13);
  const HermitianOperator h(oracle::random_hermitian(4, rng));
  const ComplexMatrix u = unitary_exponential(h, 3.3);
  CHECK(dist(u * u.adjoint(), ComplexMatrix::identity(4)) < 1e-13);
}

TEST_CASE("linear algebra kernels") {
  std::mt19937_64 rng(17);
  const ComplexMatrix a = oracle::random_hermitian(5, rng);
  ComplexMatrix tall(7, 3);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 3; ++j) tall(i, j) = a(i % 5, (i + j) % 5) + Complex(0.1 * i, 0.2 * j);
  const auto svd = linalg::thin_svd(tall);
  ComplexMatrix s(3);
  for (std::size_t j = 0; j < 3; ++j) s(j, j) = svd.sigma[j];
  CHECK(dist(svd.u * s * svd.v.adjoint(), tall) < 1e-12);
  CHECK(dist(svd.v.adjoint() * svd.v, ComplexMatrix::identity(3)) < 1e-13);

  std::vector<Complex> x{1.0, {2.0, -1.0}, -0.5};
  std::vector<Complex> b(7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 3; ++j) b[i] += tall(i, j) * x[j];
  const auto ls = linalg::solve_least_squares(tall, b, 1e-12);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(ls.solution[j] - x[j]) < 1e-11);
  CHECK(ls.rank == 3);
  CHECK(ls.nullspace.empty());

  // Wide system: one-dimensional nullspace.
  ComplexMatrix wide{{1.0, 1.0}};
  const auto lw = linalg::solve_least_squares(wide, {2.0}, 1e-12);
  CHECK(lw.nullspace.size() == 1);
  CHECK(std::abs(lw.solution[0] - 1.0) < 1e-14);
  CHECK(std::abs(lw.solution[1] - 1.0) < 1e-14);

  const ComplexMatrix dep = linalg::stack_columns({pauli(1), pauli(1), pauli(3)});
  CHECK(linalg::relative_min_singular_value(dep) < 1e-14);
  CHECK(linalg::orthonormal_range(dep, 1e-10).cols() == 2);
}

TEST_CASE("operator_map_from_action") {
  const ComplexMatrix a = pauli(1);
  const auto m = operator_map_from_action(2, {{a, Complex(2.0) * a}});
  CHECK(dist(m.apply(a), Complex(2.0) * a) < 1e-15);
  CHECK(m.apply(pauli(3)).max_abs() < 1e-15);
  CHECK_THROWS_AS(operator_map_from_action(2, {{a, a}, {Complex(2.0) * a, a}}), LinearDependenceError);

  const auto fam = d3_known(0.5, 1.0, 0.0, 1.0, 2.0);
  const auto& s = fam.system;
  CHECK(dist(fam.map.apply(s.a()), Complex(3.0) * s.a().matrix()) < 1e-12);
  CHECK(fam.map.apply(s.b()).max_abs() < 1e-12);
  CHECK(dist(fam.map.apply(s.x()), Complex(-1.0) * s.x().matrix()) < 1e-12);
  CHECK(fam.map.apply(s.theta()).max_abs() < 1e-12);
  for (const HermitianOperator* g : {&s.theta(), &s.a(), &s.b(), &s.x()}) {
    CHECK(dist(fam.closed_form.apply(*g), fam.map.apply(*g)) < 1e-12);
  }

  std::mt19937_64 rng(21);
  std::vector<GeneratorImage> pairs;
  for (int n = 0; n < 4; ++n) pairs.emplace_back(oracle::random_hermitian(3, rng), oracle::random_hermitian(3, rng));
  const auto complement = anticommutator_map(HermitianOperator::identity(3));
  const auto mc = operator_map_from_action(3, pairs, complement);
  for (const auto& [g, img] : pairs) CHECK(dist(mc.apply(g), img) < 1e-12);
}

TEST_CASE("apply_map") {
  std::mt19937_64 rng(23);
  const OperatorMap zero(3);
  CHECK(apply_map(zero, oracle::random_hermitian(3, rng)).max_abs() == 0.0);
  const auto m = anticommutator_map(HermitianOperator(oracle::random_hermitian(3, rng)));
  const ComplexMatrix a = oracle::random_hermitian(3, rng);
  const ComplexMatrix b = oracle::random_hermitian(3, rng);
  CHECK(dist(apply_map(m, Complex(2.0) * a + Complex(3.0) * b),
             Complex(2.0) * apply_map(m, a) + Complex(3.0) * apply_map(m, b)) <= 1e-12);
  CHECK_THROWS_AS(apply_map(m, ComplexMatrix(2)), DimensionMismatch);

  const double bb = 1.7;
  const auto var = d3_variation(bb, 1.0, 0.0, 0.5);
  const ComplexMatrix e21 = ComplexMatrix::unit(3, 1, 0);
  CHECK(dist(var.entrywise.apply(e21), Complex(3.0 * bb) * e21) < 1e-14);
  CHECK(dist(var.entrywise.apply(ComplexMatrix::unit(3, 2, 0)), Complex(4.0 * bb) * ComplexMatrix::unit(3, 2, 0)) < 1e-14);
  CHECK(dist(var.entrywise.apply(ComplexMatrix::unit(3, 2, 1)), Complex(5.0 * bb) * ComplexMatrix::unit(3, 2, 1)) < 1e-14);
}

TEST_CASE("Kraus-like form and Hermiticity preservation") {
  // sigma -> X^* sigma X with X = s1 is the map s1 sigma s1.
  ComplexMatrix lambda(1);
  lambda(0, 0) = 1.0;
  const auto m = kraus_form_map({pauli(1)}, lambda);
  CHECK(dist(m.apply(pauli(3)), Complex(-1.0) * pauli(3).matrix()) < 1e-15);
  CHECK(hermiticity_preservation_defect(m, {pauli(1), pauli(2), pauli(3)}) < 1e-15);
  const auto fam = d3_known(0.5, 1.0, 0.4, 1.0, 2.0);
  CHECK(hermiticity_preservation_defect(fam.map, {fam.system.theta(), fam.system.a(), fam.system.b(), fam.system.x()}) <=
        1e-12);
}

TEST_CASE("vectorisation is row-major") {
  ComplexMatrix m{{1.0, 2.0}, {3.0, 4.0}};
  const auto v = vectorize(m);
  CHECK(v[1] == Complex(2.0));
  CHECK(v[2] == Complex(3.0));
  CHECK(dist(unvectorize(v, 2), m) == 0.0);
}

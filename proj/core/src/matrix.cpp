#include "ellvne/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ellvne/errors.hpp"

namespace ellvne {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + " differ");
  }
}

constexpr int kMaxJacobiSweeps = 64;

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::unit(std::size_t dim, std::size_t i, std::size_t j) {
  ComplexMatrix m(dim);
  m(i, j) = 1.0;
  return m;
}

std::size_t ComplexMatrix::dim() const {
  if (!is_square()) throw DimensionMismatch("ComplexMatrix::dim on a non-square matrix");
  return rows_;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double ComplexMatrix::hermiticity_defect() const {
  const std::size_t d = dim();
  double defect = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      defect = std::max(defect, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return defect;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  ComplexMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "frobenius_inner");
  Complex s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
  return s;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

std::vector<Complex> vectorize(const ComplexMatrix& a) {
  return {a.data().begin(), a.data().end()};
}

ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t dim) {
  if (v.size() != dim * dim) throw DimensionMismatch("unvectorize: length is not dim^2");
  ComplexMatrix m(dim);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

HermitianOperator::HermitianOperator(ComplexMatrix m, double rel_tol) : m_(std::move(m)) {
  if (!m_.is_square() || m_.rows() == 0) {
    throw DimensionMismatch("HermitianOperator: matrix must be square with dim >= 1");
  }
  if (!m_.all_finite()) throw DomainError("HermitianOperator: non-finite entry");
  const double defect = m_.hermiticity_defect();
  if (defect > rel_tol * m_.max_abs()) {
    throw NonHermitianError("HermitianOperator: hermiticity defect " + std::to_string(defect) +
                            " exceeds tolerance");
  }
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(a.matrix() + b.matrix());
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(a.matrix() - b.matrix());
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  return HermitianOperator(Complex(s) * a.matrix());
}

HermitianOperator pauli(int index) {
  switch (index) {
    case 0: return HermitianOperator::identity(2);
    case 1: return HermitianOperator{{0.0, 1.0}, {1.0, 0.0}};
    case 2: return HermitianOperator{{0.0, -kI}, {kI, 0.0}};
    case 3: return HermitianOperator{{1.0, 0.0}, {0.0, -1.0}};
    default: throw DomainError("pauli: index must be 0..3");
  }
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "commutator");
  return a * b - b * a;
}

HermitianOperator commutator_i(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kI * commutator(a.matrix(), b.matrix()));
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "anticommutator");
  return a * b + b * a;
}

HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(anticommutator(a.matrix(), b.matrix()));
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  if (input.hermiticity_defect() > kHermitianTol * input.max_abs()) {
    throw NonHermitianError("hermitian_eigen: input is not Hermitian");
  }
  ComplexMatrix a = input;
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = std::abs(a(p, q));
        if (g <= 1e-300) continue;
        // Unitary rotation R = [[c, s e], [-s conj(e)], c]] on (p, q) with
        // e = a_pq / |a_pq|; R^* A R has a zero (p, q) entry.
        const Complex e = a(p, q) / g;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex se = s * e;
        const Complex sec = s * std::conj(e);

        // Columns: A <- A R.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - sec * akq;
          a(k, q) = se * akp + c * akq;
        }
        // Rows: A <- R^* A.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - se * aqk;
          a(q, k) = std::conj(se) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - sec * vkq;
          v(k, q) = se * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = v(k, order[j]);
  }
  return out;
}

SpectrumRecord hermitian_spectrum(const HermitianOperator& a) {
  return {hermitian_eigen(a.matrix()).eigenvalues};
}

SpectrumRecord hermitian_part_spectrum(const ComplexMatrix& a) {
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  return {hermitian_eigen(h).eigenvalues};
}

ComplexMatrix unitary_exponential(const HermitianOperator& h, double t) {
  const auto eig = hermitian_eigen(h.matrix());
  const std::size_t n = h.dim();
  ComplexMatrix scaled = eig.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex phase = std::exp(kI * (t * eig.eigenvalues[j]));
    for (std::size_t k = 0; k < n; ++k) scaled(k, j) *= phase;
  }
  return scaled * eig.eigenvectors.adjoint();
}

ComplexMatrix conjugate_by_exponential(const ComplexMatrix& a, const HermitianOperator& h, double t) {
  if (a.rows() != h.dim() || a.cols() != h.dim()) {
    throw DimensionMismatch("conjugate_by_exponential: dimensions differ");
  }
  const ComplexMatrix u = unitary_exponential(h, t);
  return u * a * u.adjoint();
}

HermitianOperator conjugate_by_exponential(const HermitianOperator& a, const HermitianOperator& h,
                                           double t) {
  ComplexMatrix r = conjugate_by_exponential(a.matrix(), h, t);
  // Symmetrise away the round-off of the triple product.
  r = 0.5 * (r + r.adjoint());
  return HermitianOperator(std::move(r));
}

}  // namespace ellvne

#pragma once

/// \file matrix.hpp
/// Small dense complex matrices and Hermitian operators.
///
/// Storage is row-major. Operators in this library are at most 8x8, so
/// every routine here favours clarity over blocking or vectorisation.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ellvne {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Relative tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTol = 1e-12;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Square d x d zero matrix.
  explicit ComplexMatrix(std::size_t dim) : ComplexMatrix(dim, dim) {}
  /// Row-major nested initializer, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);
  /// Matrix unit E_ij (zero-based indices).
  static ComplexMatrix unit(std::size_t dim, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  /// Dimension of a square matrix; throws DimensionMismatch otherwise.
  std::size_t dim() const;
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;
  /// max |a_ij - conj(a_ji)|.
  double hermiticity_defect() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius inner product Tr(a^* b).
Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);
/// ||a - b||_F.
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacked vector of the row-major entries (index i*d + j).
std::vector<Complex> vectorize(const ComplexMatrix& a);
ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t dim);

/// A matrix equal to its conjugate transpose within kHermitianTol relative to
/// its largest entry. Inputs failing the check are rejected, never symmetrised.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Throws NonHermitianError / DomainError (non-finite) / DimensionMismatch (non-square).
  explicit HermitianOperator(ComplexMatrix m, double rel_tol = kHermitianTol);
  HermitianOperator(std::initializer_list<std::initializer_list<Complex>> rows)
      : HermitianOperator(ComplexMatrix(rows)) {}

  static HermitianOperator identity(std::size_t dim) {
    return HermitianOperator(ComplexMatrix::identity(dim));
  }
  static HermitianOperator zero(std::size_t dim) { return HermitianOperator(ComplexMatrix(dim)); }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.rows(); }
  double trace() const { return m_.trace().real(); }

  operator const ComplexMatrix&() const noexcept { return m_; }  // NOLINT

 private:
  ComplexMatrix m_;
};

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator*(double s, const HermitianOperator& a);

/// Pauli matrices sigma_1, sigma_2, sigma_3 (index 1..3); index 0 gives the identity.
HermitianOperator pauli(int index);

/// i(ab - ba). Hermitian whenever a and b are.
HermitianOperator commutator_i(const HermitianOperator& a, const HermitianOperator& b);
/// Plain commutator ab - ba for general matrices.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
/// ab + ba.
HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

struct SpectrumRecord {
  std::vector<double> eigenvalues;  // ascending
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column j belongs to eigenvalues[j]
};

/// Cyclic Jacobi rotations for a Hermitian matrix. Throws NonHermitianError
/// when the input is not Hermitian.
EigenDecomposition hermitian_eigen(const ComplexMatrix& a);
SpectrumRecord hermitian_spectrum(const HermitianOperator& a);
/// Spectrum of a matrix that is Hermitian up to integration error; only the
/// Hermitian part is diagonalised.
SpectrumRecord hermitian_part_spectrum(const ComplexMatrix& a);

/// e^{i t h} for Hermitian h, built from the eigendecomposition (unitary up
/// to eigensolver round-off).
ComplexMatrix unitary_exponential(const HermitianOperator& h, double t);
/// e^{i t h} a e^{-i t h}.
HermitianOperator conjugate_by_exponential(const HermitianOperator& a, const HermitianOperator& h,
                                           double t);
ComplexMatrix conjugate_by_exponential(const ComplexMatrix& a, const HermitianOperator& h, double t);

}  // namespace ellvne

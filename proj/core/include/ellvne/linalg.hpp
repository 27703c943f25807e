#pragma once

// Dense complex least squares on top of a one-sided Jacobi SVD.

#include <cstddef>
#include <vector>

#include "ellvne/matrix.hpp"

namespace ellvne::linalg {

/// Thin SVD m = U diag(sigma) V^*, m with rows >= cols. sigma is descending.
struct Svd {
  ComplexMatrix u;  // rows x cols
  std::vector<double> sigma;
  ComplexMatrix v;  // cols x cols
};

Svd thin_svd(const ComplexMatrix& m);

/// Smallest over largest singular value; 0 for an all-zero matrix.
double relative_min_singular_value(const ComplexMatrix& m);

/// Matrix whose columns are the given d x d operators vectorised.
ComplexMatrix stack_columns(const std::vector<ComplexMatrix>& ops);

/// Orthonormal basis (columns) of the span of the columns of m, dropping
/// singular directions below rel_tol * sigma_max.
ComplexMatrix orthonormal_range(const ComplexMatrix& m, double rel_tol);

struct LeastSquares {
  std::vector<Complex> solution;            // minimum-norm solution
  std::vector<std::vector<Complex>> nullspace;  // orthonormal basis of ker(m)
  double residual = 0.0;                    // ||m x - b||
  double rhs_norm = 0.0;                    // ||b||
  std::size_t rank = 0;
};

/// Minimum-norm least-squares solution of m x = b with rank decided at
/// rel_tol * sigma_max.
LeastSquares solve_least_squares(const ComplexMatrix& m, const std::vector<Complex>& b,
                                 double rel_tol);

}  // namespace ellvne::linalg

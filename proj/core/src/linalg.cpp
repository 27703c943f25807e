#include "ellvne/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ellvne/errors.hpp"

namespace ellvne::linalg {

namespace {

constexpr int kMaxSweeps = 80;

double column_norm2(const ComplexMatrix& w, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.rows(); ++k) s += std::norm(w(k, j));
  return s;
}

}  // namespace

Svd thin_svd(const ComplexMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < cols) throw DimensionMismatch("thin_svd: expects rows >= cols");

  ComplexMatrix w = m;
  ComplexMatrix v = ComplexMatrix::identity(cols);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double alpha = column_norm2(w, p);
        const double beta = column_norm2(w, q);
        Complex gamma = 0.0;
        for (std::size_t k = 0; k < rows; ++k) gamma += std::conj(w(k, p)) * w(k, q);
        const double g = std::abs(gamma);
        if (g <= eps * std::sqrt(alpha * beta) || g == 0.0) continue;
        rotated = true;
        // Same unitary rotation as the Hermitian Jacobi step, applied to the
        // Gram matrix [[alpha, gamma], [conj(gamma), beta]] of the column pair.
        const Complex e = gamma / g;
        const double tau = (beta - alpha) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex se = s * e;
        const Complex sec = s * std::conj(e);
        for (std::size_t k = 0; k < rows; ++k) {
          const Complex wp = w(k, p);
          const Complex wq = w(k, q);
          w(k, p) = c * wp - sec * wq;
          w(k, q) = se * wp + c * wq;
        }
        for (std::size_t k = 0; k < cols; ++k) {
          const Complex vp = v(k, p);
          const Complex vq = v(k, q);
          v(k, p) = c * vp - sec * vq;
          v(k, q) = se * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) sigma[j] = std::sqrt(column_norm2(w, j));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  Svd out{ComplexMatrix(rows, cols), std::vector<double>(cols), ComplexMatrix(cols, cols)};
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t k = 0; k < cols; ++k) out.v(k, j) = v(k, src);
    if (sigma[src] > 0.0) {
      for (std::size_t k = 0; k < rows; ++k) out.u(k, j) = w(k, src) / sigma[src];
    }
  }
  return out;
}

double relative_min_singular_value(const ComplexMatrix& m) {
  const Svd svd = thin_svd(m);
  if (svd.sigma.empty() || svd.sigma.front() == 0.0) return 0.0;
  return svd.sigma.back() / svd.sigma.front();
}

ComplexMatrix stack_columns(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) throw DimensionMismatch("stack_columns: no operators");
  const std::size_t n = ops.front().rows() * ops.front().cols();
  ComplexMatrix m(n, ops.size());
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if (ops[j].rows() * ops[j].cols() != n) throw DimensionMismatch("stack_columns: sizes differ");
    for (std::size_t k = 0; k < n; ++k) m(k, j) = ops[j].data()[k];
  }
  return m;
}

ComplexMatrix orthonormal_range(const ComplexMatrix& m, double rel_tol) {
  // Work on whichever orientation the thin SVD accepts.
  if (m.rows() < m.cols()) {
    const Svd svd = thin_svd(m.adjoint());
    std::size_t rank = 0;
    while (rank < svd.sigma.size() && svd.sigma[rank] > rel_tol * svd.sigma.front()) ++rank;
    ComplexMatrix basis(m.rows(), rank);
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t k = 0; k < m.rows(); ++k) basis(k, j) = svd.v(k, j);
    return basis;
  }
  const Svd svd = thin_svd(m);
  std::size_t rank = 0;
  while (rank < svd.sigma.size() && svd.sigma[rank] > rel_tol * svd.sigma.front()) ++rank;
  ComplexMatrix basis(m.rows(), rank);
  for (std::size_t j = 0; j < rank; ++j)
    for (std::size_t k = 0; k < m.rows(); ++k) basis(k, j) = svd.u(k, j);
  return basis;
}

LeastSquares solve_least_squares(const ComplexMatrix& m, const std::vector<Complex>& b,
                                 double rel_tol) {
  if (b.size() != m.rows()) throw DimensionMismatch("solve_least_squares: rhs length");
  const std::size_t cols = m.cols();
  // Pad with zero rows so the thin SVD sees a tall matrix; this does not
  // change the solution set.
  ComplexMatrix tall = m;
  std::vector<Complex> rhs = b;
  if (m.rows() < cols) {
    tall = ComplexMatrix(cols, cols);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < cols; ++j) tall(i, j) = m(i, j);
    rhs.resize(cols, 0.0);
  }
  const Svd svd = thin_svd(tall);
  const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();

  LeastSquares out;
  out.solution.assign(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    if (svd.sigma[j] > rel_tol * smax && svd.sigma[j] > 0.0) {
      ++out.rank;
      Complex proj = 0.0;
      for (std::size_t k = 0; k < tall.rows(); ++k) proj += std::conj(svd.u(k, j)) * rhs[k];
      proj /= svd.sigma[j];
      for (std::size_t k = 0; k < cols; ++k) out.solution[k] += svd.v(k, j) * proj;
    } else {
      std::vector<Complex> null(cols);
      for (std::size_t k = 0; k < cols; ++k) null[k] = svd.v(k, j);
      out.nullspace.push_back(std::move(null));
    }
  }

  double res2 = 0.0;
  double b2 = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex r = -b[i];
    for (std::size_t j = 0; j < cols; ++j) r += m(i, j) * out.solution[j];
    res2 += std::norm(r);
    b2 += std::norm(b[i]);
  }
  out.residual = std::sqrt(res2);
  out.rhs_norm = std::sqrt(b2);
  return out;
}

}  // namespace ellvne::linalg

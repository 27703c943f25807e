#include "ellvne/operator_map.hpp"

#include <algorithm>
#include <string>

#include "ellvne/errors.hpp"
#include "ellvne/linalg.hpp"

namespace ellvne {

OperatorMap::OperatorMap(std::size_t dim) : dim_(dim), coeffs_(dim * dim, dim * dim) {}

OperatorMap::OperatorMap(std::size_t dim, ComplexMatrix coefficients)
    : dim_(dim), coeffs_(std::move(coefficients)) {
  if (coeffs_.rows() != dim * dim || coeffs_.cols() != dim * dim) {
    throw DimensionMismatch("OperatorMap: coefficient matrix must be d^2 x d^2");
  }
}

OperatorMap OperatorMap::from_function(std::size_t dim,
                                       const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  const std::size_t n = dim * dim;
  ComplexMatrix coeffs(n, n);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const ComplexMatrix image = f(ComplexMatrix::unit(dim, i, j));
      if (image.rows() != dim || image.cols() != dim) {
        throw DimensionMismatch("OperatorMap::from_function: image has the wrong shape");
      }
      const std::size_t col = i * dim + j;
      for (std::size_t k = 0; k < n; ++k) coeffs(k, col) = image.data()[k];
    }
  }
  return OperatorMap(dim, std::move(coeffs));
}

ComplexMatrix OperatorMap::apply(const ComplexMatrix& a) const {
  if (a.rows() != dim_ || a.cols() != dim_) {
    throw DimensionMismatch("OperatorMap::apply: operator is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", map acts on dim " + std::to_string(dim_));
  }
  const std::size_t n = dim_ * dim_;
  ComplexMatrix out(dim_);
  const auto in = a.data();
  auto dst = out.data();
  for (std::size_t r = 0; r < n; ++r) {
    Complex s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += coeffs_(r, c) * in[c];
    dst[r] = s;
  }
  return out;
}

OperatorMap& OperatorMap::operator+=(const OperatorMap& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("OperatorMap: dimensions differ");
  coeffs_ += other.coeffs_;
  return *this;
}

OperatorMap& OperatorMap::operator-=(const OperatorMap& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("OperatorMap: dimensions differ");
  coeffs_ -= other.coeffs_;
  return *this;
}

OperatorMap operator+(OperatorMap a, const OperatorMap& b) { return a += b; }
OperatorMap operator-(OperatorMap a, const OperatorMap& b) { return a -= b; }
OperatorMap operator*(Complex s, const OperatorMap& m) {
  return OperatorMap(m.dim(), s * m.coefficients());
}

ComplexMatrix apply_map(const OperatorMap& m, const ComplexMatrix& a) { return m.apply(a); }

OperatorMap operator_map_from_action(std::size_t dim, const std::vector<GeneratorImage>& pairs,
                                     const std::optional<OperatorMap>& complement) {
  const std::size_t n = dim * dim;
  if (pairs.empty()) return complement ? *complement : OperatorMap(dim);
  if (pairs.size() > n) throw LinearDependenceError("operator_map_from_action: more generators than dim^2");
  std::vector<ComplexMatrix> gens;
  std::vector<ComplexMatrix> images;
  for (const auto& [g, img] : pairs) {
    if (g.rows() != dim || g.cols() != dim || img.rows() != dim || img.cols() != dim) {
      throw DimensionMismatch("operator_map_from_action: generator or image has the wrong shape");
    }
    gens.push_back(g);
    images.push_back(img);
  }
  const ComplexMatrix g = linalg::stack_columns(gens);
  const ComplexMatrix h = linalg::stack_columns(images);
  const linalg::Svd svd = linalg::thin_svd(g);
  if (svd.sigma.front() == 0.0 || svd.sigma.back() <= kIndependenceTol * svd.sigma.front()) {
    throw LinearDependenceError("operator_map_from_action: generators are linearly dependent");
  }

  // Pseudo-inverse G^+ = V diag(1/sigma) U^*.
  const std::size_t m = gens.size();
  ComplexMatrix v_scaled = svd.v;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) v_scaled(k, j) /= svd.sigma[j];
  const ComplexMatrix pinv = v_scaled * svd.u.adjoint();

  ComplexMatrix coeffs = h * pinv;
  if (complement) {
    if (complement->dim() != dim) throw DimensionMismatch("operator_map_from_action: complement dim");
    // C (I - U U^*) acts only on the orthogonal complement of span{G}.
    const ComplexMatrix projector = ComplexMatrix::identity(n) - svd.u * svd.u.adjoint();
    coeffs += complement->coefficients() * projector;
  }
  return OperatorMap(dim, std::move(coeffs));
}

OperatorMap anticommutator_map(const HermitianOperator& h) {
  return OperatorMap::from_function(
      h.dim(), [&](const ComplexMatrix& s) { return anticommutator(h.matrix(), s); });
}

OperatorMap trace_map(const HermitianOperator& h) {
  return OperatorMap::from_function(h.dim(), [&](const ComplexMatrix& s) { return s.trace() * h.matrix(); });
}

OperatorMap entrywise_map(const ComplexMatrix& c) {
  const std::size_t d = c.dim();
  return OperatorMap::from_function(d, [&](const ComplexMatrix& s) {
    ComplexMatrix out(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) = c(i, j) * s(i, j);
    return out;
  });
}

OperatorMap kraus_form_map(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& lambda) {
  if (ops.empty()) throw DimensionMismatch("kraus_form_map: no operators");
  if (lambda.rows() != ops.size() || lambda.cols() != ops.size()) {
    throw DimensionMismatch("kraus_form_map: lambda must be n x n for n operators");
  }
  const std::size_t d = ops.front().dim();
  return OperatorMap::from_function(d, [&](const ComplexMatrix& s) {
    ComplexMatrix out(d);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      const ComplexMatrix left = ops[j].adjoint() * s;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        if (lambda(j, k) == Complex{}) continue;
        out += lambda(j, k) * (left * ops[k]);
      }
    }
    return out;
  });
}

double hermiticity_preservation_defect(const OperatorMap& m,
                                       const std::vector<HermitianOperator>& generators) {
  double defect = 0.0;
  for (const auto& g : generators) defect = std::max(defect, m.apply(g.matrix()).hermiticity_defect());
  return defect;
}

}  // namespace ellvne

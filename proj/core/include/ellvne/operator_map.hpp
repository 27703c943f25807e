#pragma once

/// \file operator_map.hpp
/// Linear superoperators sigma -> H[sigma] on d x d operator space, stored as
/// a dense d^2 x d^2 matrix acting on row-major vectorised operators.

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ellvne/matrix.hpp"

namespace ellvne {

class OperatorMap {
 public:
  OperatorMap() = default;
  /// Zero map on d x d operators.
  explicit OperatorMap(std::size_t dim);
  /// Takes ownership of a d^2 x d^2 coefficient matrix.
  OperatorMap(std::size_t dim, ComplexMatrix coefficients);

  /// Tabulates an arbitrary linear action by applying it to every matrix unit.
  static OperatorMap from_function(std::size_t dim,
                                   const std::function<ComplexMatrix(const ComplexMatrix&)>& f);

  std::size_t dim() const noexcept { return dim_; }
  const ComplexMatrix& coefficients() const noexcept { return coeffs_; }

  /// H[a]. Throws DimensionMismatch when a is not dim x dim.
  ComplexMatrix apply(const ComplexMatrix& a) const;
  ComplexMatrix operator()(const ComplexMatrix& a) const { return apply(a); }

  OperatorMap& operator+=(const OperatorMap& other);
  OperatorMap& operator-=(const OperatorMap& other);

 private:
  std::size_t dim_ = 0;
  ComplexMatrix coeffs_;
};

OperatorMap operator+(OperatorMap a, const OperatorMap& b);
OperatorMap operator-(OperatorMap a, const OperatorMap& b);
OperatorMap operator*(Complex s, const OperatorMap& m);

/// Free-function spelling of OperatorMap::apply.
ComplexMatrix apply_map(const OperatorMap& m, const ComplexMatrix& a);

/// Generator -> image pair.
using GeneratorImage = std::pair<ComplexMatrix, ComplexMatrix>;

/// Rank threshold (relative smallest singular value) for generator sets.
inline constexpr double kIndependenceTol = 1e-10;

/// Linear map with apply(G) = image(G) for every pair. On the orthogonal
/// complement of span{G} the map acts as `complement` (zero when absent).
/// Throws LinearDependenceError when the generators are dependent.
OperatorMap operator_map_from_action(std::size_t dim, const std::vector<GeneratorImage>& pairs,
                                     const std::optional<OperatorMap>& complement = std::nullopt);

/// sigma -> {h, sigma}.
OperatorMap anticommutator_map(const HermitianOperator& h);
/// sigma -> Tr(sigma) h.
OperatorMap trace_map(const HermitianOperator& h);
/// sigma -> c o sigma (entrywise product); Hermitian-preserving for real symmetric c.
OperatorMap entrywise_map(const ComplexMatrix& c);
/// sigma -> sum_jk lambda_jk X_j^* sigma X_k.
OperatorMap kraus_form_map(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& lambda);

/// Largest hermiticity defect of apply(g) over the given Hermitian generators.
double hermiticity_preservation_defect(const OperatorMap& m,
                                       const std::vector<HermitianOperator>& generators);

}  // namespace ellvne

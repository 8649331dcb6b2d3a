#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oscat/matrix.hpp"
#include "oscat/optimizer.hpp"

namespace oscat {

enum class SpaceKind { Zero, Concrete, Dual, Min, Max, SumInf, Sum1, Quotient, Subspace, Custom };

std::string kindName(SpaceKind k);

/// n x n matrix of coordinate vectors over a space's basis (row-major).
struct ElementMatrix {
  int level = 1;
  std::vector<CVector> coords;

  static ElementMatrix zero(int level, Eigen::Index dim);
  const CVector& at(int i, int j) const { return coords[static_cast<std::size_t>(i * level + j)]; }
  CVector& at(int i, int j) { return coords[static_cast<std::size_t>(i * level + j)]; }
  Eigen::Index dim() const { return coords.empty() ? 0 : coords.front().size(); }
};

CVector flattenElement(const ElementMatrix& x);
ElementMatrix unflattenElement(int level, Eigen::Index dim, const CVector& v);

/// Block-diagonal direct sum x ⊕ y.
ElementMatrix directSumElement(const ElementMatrix& x, const ElementMatrix& y);

/// Scalar two-sided action α x β with α, β in M_m (m = x.level).
ElementMatrix scalarSandwich(const CMatrix& alpha, const ElementMatrix& x, const CMatrix& beta);

/// Embed a level-m element as the top-left block of a level-n element (n >= m).
ElementMatrix padElement(const ElementMatrix& x, int level);

ElementMatrix randomElement(Eigen::Index dim, int level, std::uint64_t seed);

nlohmann::json elementToJson(const ElementMatrix& x);
ElementMatrix elementFromJson(const nlohmann::json& j);

/// A finite-dimensional operator space: a coordinate space together with a
/// norm oracle for every amplification level. Immutable; cheap to copy.
class OperatorSpace {
 public:
  struct Impl;

  OperatorSpace();  // the zero space

  Eigen::Index dim() const;
  SpaceKind kind() const;
  /// True when the norm oracle is an exact computation (Concrete and
  /// friends); optimizer-backed oracles report interval estimates.
  bool exactNorms() const;

  NormEstimate norm(const ElementMatrix& x, const OptimizerConfig& cfg = {}) const;
  /// Representative scalar value of the norm (exact value, optimizer lower
  /// bound, or minimization upper bound for quotient spaces).
  double normValue(const ElementMatrix& x, const OptimizerConfig& cfg = {}) const;

  // Concrete accessors (throw for other kinds).
  Eigen::Index ambientDim() const;
  const std::vector<CMatrix>& basis() const;
  CMatrix assemble(const ElementMatrix& x) const;

  /// Unit ball of M_n(this) over flattened coordinates.
  BallSpec unitBall(int level, const OptimizerConfig& cfg) const;

  nlohmann::json describe() const;
  bool sameAs(const OperatorSpace& o) const { return impl_ == o.impl_; }

  explicit OperatorSpace(std::shared_ptr<const Impl> impl);
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

OperatorSpace zeroSpace();
OperatorSpace scalarSpace();
OperatorSpace matrixSpace(int k);
/// m x n matrices with the corner-embedding operator space structure.
OperatorSpace rectMatrixSpace(int rows, int cols);
OperatorSpace traceClass(int k);
OperatorSpace columnHilbert(int d);
OperatorSpace concreteSpace(Eigen::Index ambientDim, std::vector<CMatrix> basis);

OperatorSpace minQuant(const OperatorSpace& base);
OperatorSpace maxQuant(const OperatorSpace& base);

OperatorSpace directSumInf(const std::vector<OperatorSpace>& parts);
OperatorSpace directSum1(const std::vector<OperatorSpace>& parts);

/// Quotient by the span of the given coordinate vectors.
OperatorSpace quotientSpace(const OperatorSpace& X, const std::vector<CVector>& nullBasis);
/// Subspace spanned by the columns of basisCoords (dim(X) x subDim).
OperatorSpace subspaceOf(const OperatorSpace& X, const CMatrix& basisCoords);

OperatorSpace dualSpace(const OperatorSpace& X);

/// Space with a caller-supplied norm oracle (used for tensor-product spaces).
OperatorSpace customSpace(Eigen::Index dim, std::string label,
                          std::function<NormEstimate(const ElementMatrix&, const OptimizerConfig&)> oracle,
                          bool exact);

/// Map a quotient-space element to its representative coordinates in the
/// parent space, and related structural accessors.
const OperatorSpace& parentOf(const OperatorSpace& X);      // Quotient/Subspace/Dual base
CMatrix subspaceInjection(const OperatorSpace& X);          // Subspace
CMatrix quotientRepresentative(const OperatorSpace& X);     // dim(parent) x dim(X)
CMatrix quotientNullInjection(const OperatorSpace& X);      // dim(parent) x dim(N)

/// Structure predicates used by norm shortcuts elsewhere.
bool isFullMatrixSpace(const OperatorSpace& X);   // Concrete with matrix-unit basis
bool isTraceClassLike(const OperatorSpace& X);    // Dual of a full matrix space
CMatrix dualPairingOf(const OperatorSpace& X);    // Dual kind pairing matrix

OperatorSpace spaceFromJson(const nlohmann::json& j);

}  // namespace oscat

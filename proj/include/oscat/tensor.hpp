#pragma once

#include <utility>

#include "oscat/cbmap.hpp"

namespace oscat {

/// Bilinear map X x Y -> Z on basis coordinates. Column index of coeffs is
/// l * right.dim + r for the pair (basis_l, basis_r).
struct BilinearMap {
  OperatorSpace left;
  OperatorSpace right;
  OperatorSpace target;
  CMatrix coeffs;  // target.dim x (left.dim * right.dim)
};

BilinearMap makeBilinearMap(OperatorSpace left, OperatorSpace right, OperatorSpace target,
                            CMatrix coeffs);
/// u(a, b) = a b on matrixSpace(k).
BilinearMap multiplicationMap(int k);

/// Evaluate on level-1 coordinate vectors.
CVector applyBilinear(const BilinearMap& u, const CVector& x, const CVector& y);

nlohmann::json bilinearToJson(const BilinearMap& u);
BilinearMap bilinearFromJson(const nlohmann::json& j);

/// Element of M_n(X (x) Y); tensor coordinate index is l * rightDim + r, and
/// amplified blocks follow the [(i,k),(j,l)] row-times-column convention.
struct TensorElement {
  int level = 1;
  Eigen::Index leftDim = 0;
  Eigen::Index rightDim = 0;
  std::vector<CVector> coords;  // level*level entries, each leftDim*rightDim

  ElementMatrix asElement() const;
  static TensorElement fromElement(const ElementMatrix& x, Eigen::Index leftDim,
                                   Eigen::Index rightDim);
};

/// x (x) y for x in M_p(X), y in M_q(Y), with the (i,k),(j,l) convention.
TensorElement tensorOf(const ElementMatrix& x, const ElementMatrix& y);

nlohmann::json tensorToJson(const TensorElement& v);
TensorElement tensorFromJson(const nlohmann::json& j);

/// Completely projective tensor norm: upper bounds from factorizations
/// v = alpha (x (x) y) beta, lower bounds from jointly completely
/// contractive test maps.
NormEstimate projectiveNorm(const OperatorSpace& X, const OperatorSpace& Y,
                            const TensorElement& v, const OptimizerConfig& cfg = {});

/// Haagerup tensor norm: upper bounds from row-times-column factorizations
/// z = x (.) y (plus conversion of projective factorizations), lower bounds
/// from multiplicatively contractive test maps. Requires exact factor norms.
NormEstimate haagerupNorm(const OperatorSpace& X, const OperatorSpace& Y, const TensorElement& z,
                          const OptimizerConfig& cfg = {});

using BilinearWarmStart = std::pair<ElementMatrix, ElementMatrix>;

/// sup over x in Ball M_n(X), y in Ball M_m(Y), n,m <= maxLevel of
/// || [u(x_ij, y_kl)]_{(i,k),(j,l)} ||.
NormEstimate jcbNorm(const BilinearMap& u, int maxLevel, const OptimizerConfig& cfg = {},
                     const std::vector<BilinearWarmStart>& warmStarts = {});

/// sup over f, g in Ball M_n with the row-times-column composition
/// [sum_k u(f_ik, g_kj)], n <= maxLevel.
NormEstimate mbNorm(const BilinearMap& u, int maxLevel, const OptimizerConfig& cfg = {},
                    const std::vector<BilinearWarmStart>& warmStarts = {});

/// Tensor coordinate space carrying the projective norm oracle.
OperatorSpace projTensorSpace(const OperatorSpace& X, const OperatorSpace& Y);

/// Unique linear extension of u to the projective tensor coordinates.
CBMap linearize(const BilinearMap& u);

struct HaagerupFactorization {
  CBMap psi1;  // X -> rectMatrixSpace(k, r)
  CBMap psi2;  // Y -> rectMatrixSpace(r, k)
  int innerDim = 0;
  double cb1 = 0.0;
  double cb2 = 0.0;
  double residual = 0.0;
};

struct HaagerupTestResult {
  bool factorized = false;
  HaagerupFactorization factorization;
  nlohmann::json obstruction;  // contains the best mb lower bound when not factorized
};

/// Searches for completely contractive psi1, psi2 with
/// u(x, y) = psi1(x) psi2(y); otherwise reports the mb obstruction.
HaagerupTestResult haagerupFactorizationTest(const BilinearMap& u, const OptimizerConfig& cfg = {},
                                             const std::vector<BilinearWarmStart>& mbWarmStarts = {});

}  // namespace oscat

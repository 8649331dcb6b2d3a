#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace oscat {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest singular value. Empty matrices have norm 0.
double operatorNorm(const CMatrix& a);

/// Sum of singular values.
double traceNorm(const CMatrix& a);

/// Kronecker product with block convention [a_ij * b]_{(i,k),(j,l)}.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Smallest eigenvalue of the Hermitian part (h + h†)/2.
/// Throws if h deviates from Hermitian by more than 1e-10 * ||h||.
double minEigenvalue(const CMatrix& h);

bool isFinite(const CMatrix& a);
void requireFinite(const CMatrix& a, const std::string& what);

CMatrix dagger(const CMatrix& a);
CMatrix hermitianPart(const CMatrix& a);

/// Unitary polar factor U V† from the SVD a = U S V†. For rank-deficient a
/// the factor is completed deterministically from the SVD bases.
CMatrix polarFactor(const CMatrix& a);

/// Left/right singular vectors of the largest singular value.
struct SingularPair {
  double value = 0.0;
  CVector left;
  CVector right;
};
SingularPair topSingularPair(const CMatrix& a);

/// Column-stacking vectorization, vec(AXB) = (B^T ⊗ A) vec(X).
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Interchange format {"rows": n, "cols": m, "data": [[re, im], ...]} row-major.
nlohmann::json matrixToJson(const CMatrix& a);
CMatrix matrixFromJson(const nlohmann::json& j);

nlohmann::json vectorToJson(const CVector& v);
CVector vectorFromJson(const nlohmann::json& j);

}  // namespace oscat

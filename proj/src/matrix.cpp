#include "oscat/matrix.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace oscat {

double operatorNorm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double traceNorm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double minEigenvalue(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("minEigenvalue: matrix not square");
  const double scale = operatorNorm(h);
  const double dev = operatorNorm(h - h.adjoint());
  if (dev > 1e-10 * std::max(scale, 1.0)) throw std::invalid_argument("not Hermitian");
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitianPart(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool isFinite(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void requireFinite(const CMatrix& a, const std::string& what) {
  if (!isFinite(a)) throw std::invalid_argument(what + ": non-finite entries");
}

CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

CMatrix hermitianPart(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix polarFactor(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

SingularPair topSingularPair(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularPair p;
  if (svd.singularValues().size() == 0) {
    p.left = CVector::Zero(a.rows());
    p.right = CVector::Zero(a.cols());
    return p;
  }
  p.value = svd.singularValues()(0);
  p.left = svd.matrixU().col(0);
  p.right = svd.matrixV().col(0);
  return p;
}

CVector vec(const CMatrix& a) {
  CVector v(a.size());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) v(k++) = a(i, j);
  return v;
}

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  CMatrix a(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = v(k++);
  return a;
}

nlohmann::json matrixToJson(const CMatrix& a) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      data.push_back({a(i, j).real(), a(i, j).imag()});
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

CMatrix matrixFromJson(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::invalid_argument("matrixFromJson: data length mismatch");
  CMatrix a(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      a(i, j2) = Complex(data[k][0].get<double>(), data[k][1].get<double>());
      ++k;
    }
  requireFinite(a, "matrixFromJson");
  return a;
}

nlohmann::json vectorToJson(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

CVector vectorFromJson(const nlohmann::json& j) {
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = Complex(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

}  // namespace oscat

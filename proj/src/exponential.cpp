#include "oscat/exponential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscat {

namespace {

double pointNorm(const OperatorSpace& space, const CVector& x) {
  ElementMatrix e = ElementMatrix::zero(1, space.dim());
  e.coords[0] = x;
  return space.normValue(e);
}

CMatrix assemblePoint(const OperatorSpace& space, const CVector& x) {
  if (space.kind() != SpaceKind::Concrete)
    throw std::invalid_argument("lifted primitive requires a concrete space");
  ElementMatrix e = ElementMatrix::zero(1, space.dim());
  e.coords[0] = x;
  return space.assemble(e);
}

}  // namespace

FreeL1Element makeFreeL1(const OperatorSpace& space, std::vector<FreeL1Element::Term> support) {
  for (const auto& t : support) {
    if (t.point.size() != space.dim())
      throw std::invalid_argument("makeFreeL1: point size mismatch");
    if (pointNorm(space, t.point) > 1.0 + 1e-9) throw std::invalid_argument("outside unit ball");
  }
  return {space, std::move(support)};
}

double l1Norm(const FreeL1Element& e) {
  double s = 0.0;
  for (const auto& t : e.support) s += std::abs(t.coeff);
  return s;
}

FreeL1Element promote(const OperatorSpace& space, const CVector& x) {
  return makeFreeL1(space, {{x, Complex(1.0)}});
}

FreeL1Element addFreeL1(const FreeL1Element& a, const FreeL1Element& b) {
  if (!a.space.sameAs(b.space) && a.space.dim() != b.space.dim())
    throw std::invalid_argument("addFreeL1: space mismatch");
  FreeL1Element out = a;
  for (const auto& t : b.support) {
    bool merged = false;
    for (auto& s : out.support) {
      if (s.point.size() == t.point.size() && s.point == t.point) {
        s.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.support.push_back(t);
  }
  return out;
}

FreeL1Element scaleFreeL1(const Complex& c, const FreeL1Element& e) {
  FreeL1Element out = e;
  for (auto& t : out.support) t.coeff *= c;
  return out;
}

nlohmann::json freeL1ToJson(const FreeL1Element& e) {
  nlohmann::json support = nlohmann::json::array();
  for (const auto& t : e.support)
    support.push_back({{"point", vectorToJson(t.point)},
                       {"coeff", {t.coeff.real(), t.coeff.imag()}}});
  return {{"space", e.space.describe()}, {"support", support}};
}

FreeL1Element freeL1FromJson(const nlohmann::json& j) {
  OperatorSpace space = spaceFromJson(j.at("space"));
  std::vector<FreeL1Element::Term> support;
  for (const auto& t : j.at("support")) {
    const auto& c = t.at("coeff");
    support.push_back({vectorFromJson(t.at("point")),
                       Complex(c.at(0).get<double>(), c.at(1).get<double>())});
  }
  return makeFreeL1(space, std::move(support));
}

CVector linearizeBallFunction(const OperatorSpace& Y, const BallFunction& g,
                              const FreeL1Element& e) {
  CVector out = CVector::Zero(Y.dim());
  for (const auto& t : e.support) {
    const CVector img = g(t.point);
    if (img.size() != Y.dim())
      throw std::invalid_argument("linearizeBallFunction: image size mismatch");
    const double n = pointNorm(Y, img);
    if (n > 1.0 + 1e-6)
      throw std::runtime_error("linearizeBallFunction: image escapes the unit ball (norm " +
                               std::to_string(n) + ")");
    out += t.coeff * img;
  }
  return out;
}

CMatrix uAdjoint(const CMatrix& f) { return dagger(f); }

CMatrix uCtrl(const CMatrix& f) {
  if (f.rows() != f.cols()) throw std::invalid_argument("uCtrl: matrix must be square");
  const Eigen::Index d = f.rows();
  CMatrix out = CMatrix::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) = CMatrix::Identity(d, d);
  out.bottomRightCorner(d, d) = f;
  return out;
}

Channel uApply(const CMatrix& f) {
  return makeChannel(f.cols(), f.rows(), kron(f.conjugate(), f), Picture::Schrodinger);
}

CMatrix adjointL(const FreeL1Element& e) {
  const OperatorSpace& X = e.space;
  CMatrix out = CMatrix::Zero(X.ambientDim(), X.ambientDim());
  for (const auto& t : e.support) out += t.coeff * dagger(assemblePoint(X, t.point));
  return out;
}

CMatrix ctrlL(const FreeL1Element& e) {
  const OperatorSpace& X = e.space;
  CMatrix out = CMatrix::Zero(2 * X.ambientDim(), 2 * X.ambientDim());
  for (const auto& t : e.support) out += t.coeff * uCtrl(assemblePoint(X, t.point));
  return out;
}

Channel applyL(const FreeL1Element& e) {
  const OperatorSpace& X = e.space;
  const Eigen::Index d = X.ambientDim();
  CMatrix superop = CMatrix::Zero(d * d, d * d);
  for (const auto& t : e.support) superop += t.coeff * uApply(assemblePoint(X, t.point)).superop;
  return makeChannel(d, d, std::move(superop), Picture::Schrodinger);
}

}  // namespace oscat

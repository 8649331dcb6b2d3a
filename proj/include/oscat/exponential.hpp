#pragma once

#include "oscat/channel.hpp"

namespace oscat {

/// Finitely supported formal combination of unit-ball points of a space;
/// the norm is the sum of coefficient magnitudes.
struct FreeL1Element {
  OperatorSpace space;
  struct Term {
    CVector point;
    Complex coeff;
  };
  std::vector<Term> support;
};

FreeL1Element makeFreeL1(const OperatorSpace& space, std::vector<FreeL1Element::Term> support);
double l1Norm(const FreeL1Element& e);
FreeL1Element promote(const OperatorSpace& space, const CVector& x);
/// Merges terms at exactly equal points; nearby points stay distinct.
FreeL1Element addFreeL1(const FreeL1Element& a, const FreeL1Element& b);
FreeL1Element scaleFreeL1(const Complex& c, const FreeL1Element& e);

nlohmann::json freeL1ToJson(const FreeL1Element& e);
FreeL1Element freeL1FromJson(const nlohmann::json& j);

/// Coordinate form of a function from the unit ball of the element's space
/// into the unit ball of Y.
using BallFunction = std::function<CVector(const CVector&)>;

/// sum_i lambda_i g(x_i); throws when an image escapes the unit ball of Y.
CVector linearizeBallFunction(const OperatorSpace& Y, const BallFunction& g,
                              const FreeL1Element& e);

CMatrix uAdjoint(const CMatrix& f);
/// |0><0| (x) id + |1><1| (x) f for square f.
CMatrix uCtrl(const CMatrix& f);
/// f (.) f-dagger as a Schrodinger-picture superoperator.
Channel uApply(const CMatrix& f);

/// Linearized primitives on unit-ball supported combinations over a concrete
/// matrix space.
CMatrix adjointL(const FreeL1Element& e);
CMatrix ctrlL(const FreeL1Element& e);
Channel applyL(const FreeL1Element& e);

}  // namespace oscat

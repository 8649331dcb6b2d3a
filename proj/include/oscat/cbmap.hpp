#pragma once

#include <string>

#include "oscat/opspace.hpp"

namespace oscat {

/// Linear map between operator spaces, acting on basis coordinates.
struct CBMap {
  OperatorSpace domain;
  OperatorSpace codomain;
  CMatrix coeffs;  // codomain.dim x domain.dim
};

CBMap makeCBMap(OperatorSpace domain, OperatorSpace codomain, CMatrix coeffs);
CBMap identityMap(const OperatorSpace& space);
CBMap zeroMap(const OperatorSpace& domain, const OperatorSpace& codomain);
/// Transpose map on matrixSpace(k) coordinates.
CBMap transposeMap(int k);

/// Entrywise application of u to a coordinate matrix of any level.
ElementMatrix amplify(const CBMap& u, const ElementMatrix& x);

/// Best found value of ||u_n(x)|| over ||x||_n <= 1.
NormEstimate amplifiedNorm(const CBMap& u, int n, const OptimizerConfig& cfg = {},
                           const std::vector<ElementMatrix>& warmStarts = {});

/// Max of amplifiedNorm over levels 1..maxLevel. When the codomain is a full
/// matrix space M_k and maxLevel >= k, the level-k value is certified exact
/// (a cb norm into M_k is attained at amplification level k).
NormEstimate cbNormLower(const CBMap& u, int maxLevel, const OptimizerConfig& cfg = {},
                         const std::vector<ElementMatrix>& warmStarts = {});

enum class Verdict { Holds, Fails, Inconclusive };
std::string verdictName(Verdict v);

struct VerdictReport {
  Verdict verdict = Verdict::Inconclusive;
  nlohmann::json witness;
  std::string reason;
};

VerdictReport isCompleteContraction(const CBMap& u, int maxLevel, const OptimizerConfig& cfg = {},
                                    double tol = 1e-6);
VerdictReport isCompleteIsometry(const CBMap& u, int maxLevel, const OptimizerConfig& cfg = {},
                                 double tol = 1e-6);

/// u after v.
CBMap compose(const CBMap& u, const CBMap& v);

/// Subspace of the common domain where f and g agree.
OperatorSpace equalizer(const CBMap& f, const CBMap& g);
/// Quotient of the common codomain by the range of f - g.
OperatorSpace coequalizer(const CBMap& f, const CBMap& g);

nlohmann::json mapToJson(const CBMap& u);
CBMap mapFromJson(const nlohmann::json& j);

nlohmann::json verdictToJson(const VerdictReport& r);

}  // namespace oscat

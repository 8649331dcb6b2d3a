#pragma once

#include "oscat/channel.hpp"
#include "oscat/tensor.hpp"

namespace oscat {

/// Pair of spaces with a scalar-valued jointly completely contractive pairing.
struct ChuObject {
  OperatorSpace left;
  OperatorSpace right;
  BilinearMap pairing;  // left x right -> scalars
  Eigen::Index hsDim = 0;  // > 0 when built from hsObject(d)
  bool hsFlipped = false;
};

ChuObject makeChuObject(OperatorSpace left, OperatorSpace right, BilinearMap pairing);

/// (trace class, matrix algebra, trace pairing).
ChuObject hsObject(int d);

/// Swap the sides and precompose the pairing with the flip; an involution.
ChuObject dualObject(const ChuObject& a);

Complex chuPairingValue(const ChuObject& a, const CVector& x, const CVector& y);

/// jcc invariant of the pairing: lower bound <= 1 + 1e-6 at levels <= maxLevel.
nlohmann::json chuCheck(const ChuObject& a, const OptimizerConfig& cfg = {}, int maxLevel = 2);

struct ChuMorphism {
  CBMap forward;   // a.left -> b.left
  CBMap backward;  // b.right -> a.right
};

/// Adjointness on full bases plus contraction verdicts for both components.
VerdictReport morphismValid(const ChuMorphism& m, const ChuObject& a, const ChuObject& b,
                            const OptimizerConfig& cfg = {}, int maxLevel = 2);

/// Morphism (ch, transpose of ch) between HS objects.
ChuMorphism channelMorphism(const Channel& ch);

/// Spatial tensor of HS objects: hsObject(d1 * d2).
ChuObject tensorHS(const ChuObject& a, const ChuObject& b);
/// Verifies the coordinate identifications behind tensorHS: pairing
/// multiplicativity on product bases and both side isometries on samples.
nlohmann::json tensorHSReport(const ChuObject& a, const ChuObject& b,
                              const OptimizerConfig& cfg = {});

enum class SumKind { Plus, With };

ChuObject additiveSum(const ChuObject& a, const ChuObject& b, SumKind kind);

/// Polarized formula interpreter. Atoms `P:d` / `N:d`; connectives `*` `%`
/// `+` `&`, postfix `~`, parentheses.
ChuObject interpretFormula(const std::string& formula);
nlohmann::json polarityReport(const std::string& formula);

nlohmann::json chuToJson(const ChuObject& a);
ChuObject chuFromJson(const nlohmann::json& j);

}  // namespace oscat

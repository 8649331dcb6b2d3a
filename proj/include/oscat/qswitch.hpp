#pragma once

#include "oscat/tensor.hpp"

namespace oscat {

/// u(f, g) = |0><0| (x) fg + |1><1| (x) gf as a bilinear map
/// matrixSpace(d) x matrixSpace(d) -> matrixSpace(2d).
struct SwitchInstance {
  int dimH = 0;
  BilinearMap map;
};

SwitchInstance buildSwitch(int d);

/// jcb lower bound with the identity pair as warm start; consistent with a
/// cb norm of one when no witness exceeds 1 + 1e-6.
nlohmann::json switchJcbCertificate(const SwitchInstance& s, int maxLevel,
                                    const OptimizerConfig& cfg = {});

/// Exact arithmetic witness: f with entries f_ij = e_ji on an n-frame and
/// k = |1> (x) v_1 give |u_(n)(f, f) k| = n.
nlohmann::json switchMbWitness(const SwitchInstance& s, int n);

/// Row-times-column factorization test; obstructed for dimH >= 2 with mb
/// lower bound dimH from the exact witness.
nlohmann::json noHaagerupFactorization(const SwitchInstance& s, const OptimizerConfig& cfg = {});

}  // namespace oscat

#include "oscat/qswitch.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscat {

namespace {

// Entry (i, j) = E_ji over the first n matrix units of M_d; assembles to a
// rearranged identity of norm one.
ElementMatrix frameElement(int n, int d) {
  ElementMatrix f = ElementMatrix::zero(n, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.at(i, j)(static_cast<Eigen::Index>(j) * d + i) = 1.0;
  return f;
}

ElementMatrix identityLevel1(int d) {
  ElementMatrix x = ElementMatrix::zero(1, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) x.coords[0](static_cast<Eigen::Index>(i) * d + i) = 1.0;
  return x;
}

}  // namespace

SwitchInstance buildSwitch(int d) {
  if (d < 1) throw std::invalid_argument("buildSwitch: dimension must be >= 1");
  OperatorSpace md = matrixSpace(d);
  OperatorSpace target = matrixSpace(2 * d);
  const Eigen::Index dd = md.dim();
  CMatrix coeffs = CMatrix::Zero(target.dim(), dd * dd);
  const Eigen::Index w = 2 * static_cast<Eigen::Index>(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          const Eigen::Index col = (static_cast<Eigen::Index>(a) * d + b) * dd +
                                   static_cast<Eigen::Index>(c) * d + e;
          if (b == c) coeffs(static_cast<Eigen::Index>(a) * w + e, col) += 1.0;
          if (e == a) coeffs((d + static_cast<Eigen::Index>(c)) * w + (d + b), col) += 1.0;
        }
  SwitchInstance s{d, makeBilinearMap(md, md, target, std::move(coeffs))};

  const CVector idc = identityLevel1(d).coords[0];
  ElementMatrix img = ElementMatrix::zero(1, target.dim());
  img.coords[0] = applyBilinear(s.map, idc, idc);
  if ((target.assemble(img) - CMatrix::Identity(w, w)).norm() > 1e-12)
    throw std::logic_error("buildSwitch: identity invariant failed");
  return s;
}

nlohmann::json switchJcbCertificate(const SwitchInstance& s, int maxLevel,
                                    const OptimizerConfig& cfg) {
  const ElementMatrix id1 = identityLevel1(s.dimH);
  NormEstimate e = jcbNorm(s.map, maxLevel, cfg, {{id1, id1}});
  const bool violation = e.lower > 1.0 + 1e-6;
  return {{"dimH", s.dimH},
          {"maxLevel", maxLevel},
          {"jcbLower", e.lower},
          {"violation", violation},
          {"consistent", !violation && std::abs(e.lower - 1.0) <= 1e-4},
          {"witness", e.witness}};
}

nlohmann::json switchMbWitness(const SwitchInstance& s, int n) {
  if (n < 1) throw std::invalid_argument("switchMbWitness: n must be >= 1");
  if (n > s.dimH) throw std::invalid_argument("switchMbWitness: n exceeds dimH");
  const int d = s.dimH;
  const Eigen::Index w = 2 * static_cast<Eigen::Index>(d);

  const ElementMatrix f = frameElement(n, d);
  const CMatrix fhat = s.map.left.assemble(f);
  const double fnorm = operatorNorm(fhat);

  // row-times-column composition [sum_k u(f_ik, f_kj)] assembled on C^n (x) C^2d
  CMatrix big = CMatrix::Zero(n * w, n * w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CVector acc = CVector::Zero(s.map.target.dim());
      for (int k = 0; k < n; ++k) acc += applyBilinear(s.map, f.at(i, k), f.at(k, j));
      ElementMatrix cell = ElementMatrix::zero(1, s.map.target.dim());
      cell.coords[0] = acc;
      big.block(static_cast<Eigen::Index>(i) * w, static_cast<Eigen::Index>(j) * w, w, w) =
          s.map.target.assemble(cell);
    }

  CVector k = CVector::Zero(n * w);
  k(d) = 1.0;  // first block row, |1> (x) v_1
  const double value = (big * k).norm();

  return {{"dimH", d},
          {"n", n},
          {"mbLower", value},
          {"witnessF", matrixToJson(fhat)},
          {"witnessK", vectorToJson(k)},
          {"witnessFNorm", fnorm},
          {"witnessKNorm", k.norm()},
          {"verdict", value > 1.0 + 1e-6 ? "obstructed" : "factorized"}};
}

nlohmann::json noHaagerupFactorization(const SwitchInstance& s, const OptimizerConfig& cfg) {
  nlohmann::json witness = switchMbWitness(s, s.dimH);
  const ElementMatrix f = frameElement(s.dimH, s.dimH);
  HaagerupTestResult res = haagerupFactorizationTest(s.map, cfg, {{f, f}});
  double mbLower = witness.at("mbLower").get<double>();
  if (!res.factorized && res.obstruction.contains("mbLower"))
    mbLower = std::max(mbLower, res.obstruction.at("mbLower").get<double>());
  nlohmann::json out = witness;
  out["mbLower"] = mbLower;
  out["verdict"] = res.factorized ? "factorized" : "obstructed";
  if (res.factorized) {
    out["innerDim"] = res.factorization.innerDim;
    out["factorCbNorm"] = res.factorization.cb1;
  } else {
    out["factorizationResidual"] = res.obstruction.at("residual");
    out["factorCost"] = res.obstruction.at("factorCost");
  }
  return out;
}

}  // namespace oscat

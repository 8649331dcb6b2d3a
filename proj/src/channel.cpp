#include "oscat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscat {

std::string pictureName(Picture p) {
  return p == Picture::Schrodinger ? "schrodinger" : "heisenberg";
}

Channel makeChannel(Eigen::Index dimIn, Eigen::Index dimOut, CMatrix superop, Picture picture) {
  if (dimIn < 1 || dimOut < 1) throw std::invalid_argument("makeChannel: dimensions must be >= 1");
  if (superop.rows() != dimOut * dimOut || superop.cols() != dimIn * dimIn)
    throw std::invalid_argument("makeChannel: superoperator shape mismatch");
  requireFinite(superop, "makeChannel");
  return {dimIn, dimOut, std::move(superop), picture};
}

CMatrix applyChannel(const Channel& ch, const CMatrix& x) {
  if (x.rows() != ch.dimIn || x.cols() != ch.dimIn)
    throw std::invalid_argument("applyChannel: input dimension mismatch");
  return unvec(ch.superop * vec(x), ch.dimOut, ch.dimOut);
}

CMatrix choiOf(const Channel& ch) {
  const Eigen::Index d1 = ch.dimIn, d2 = ch.dimOut;
  CMatrix c = CMatrix::Zero(d1 * d2, d1 * d2);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j) {
      CMatrix e = CMatrix::Zero(d1, d1);
      e(i, j) = 1.0;
      c.block(i * d2, j * d2, d2, d2) = applyChannel(ch, e);
    }
  return c;
}

Channel transposeChannel(const Channel& ch) {
  Picture p = ch.picture == Picture::Schrodinger ? Picture::Heisenberg : Picture::Schrodinger;
  return {ch.dimOut, ch.dimIn, ch.superop.adjoint(), p};
}

Complex tracePairing(const CMatrix& x, const CMatrix& b) {
  if (x.rows() != x.cols() || x.rows() != b.rows() || b.rows() != b.cols())
    throw std::invalid_argument("tracePairing: dimension mismatch");
  return (x * b).trace();
}

VerdictReport isCompletelyPositive(const Channel& ch) {
  const CMatrix c = choiOf(ch);
  const double scale = std::max(operatorNorm(c), 1e-30);
  VerdictReport r;
  if ((c - c.adjoint()).norm() > 1e-9 * scale) {
    r.verdict = Verdict::Fails;
    r.reason = "Choi matrix is not Hermitian";
    return r;
  }
  const double me = minEigenvalue(hermitianPart(c));
  r.witness = {{"minEigenvalue", me}, {"choiNorm", operatorNorm(c)}};
  if (me >= -1e-9 * operatorNorm(c)) {
    r.verdict = Verdict::Holds;
    r.reason = "Choi matrix is positive semidefinite";
  } else {
    r.verdict = Verdict::Fails;
    r.reason = "Choi matrix has a negative eigenvalue";
  }
  return r;
}

VerdictReport isTracePreserving(const Channel& ch) {
  VerdictReport r;
  double dev = 0.0;
  for (Eigen::Index i = 0; i < ch.dimIn; ++i)
    for (Eigen::Index j = 0; j < ch.dimIn; ++j) {
      CMatrix e = CMatrix::Zero(ch.dimIn, ch.dimIn);
      e(i, j) = 1.0;
      const Complex t = applyChannel(ch, e).trace() - (i == j ? Complex(1.0) : Complex(0.0));
      dev = std::max(dev, std::abs(t));
    }
  r.witness = {{"maxDeviation", dev}};
  r.verdict = dev <= 1e-9 ? Verdict::Holds : Verdict::Fails;
  r.reason = r.verdict == Verdict::Holds ? "traces preserved on the matrix-unit basis"
                                         : "trace changes on a basis element";
  return r;
}

VerdictReport isUnital(const Channel& ch) {
  VerdictReport r;
  const CMatrix img = applyChannel(ch, CMatrix::Identity(ch.dimIn, ch.dimIn));
  const double dev = (img - CMatrix::Identity(ch.dimOut, ch.dimOut)).norm();
  r.witness = {{"deviation", dev}};
  r.verdict = dev <= 1e-9 ? Verdict::Holds : Verdict::Fails;
  r.reason = r.verdict == Verdict::Holds ? "identity maps to identity" : "identity is not fixed";
  return r;
}

VerdictReport isPositive(const Channel& ch, std::uint64_t seed) {
  VerdictReport cp = isCompletelyPositive(ch);
  if (cp.verdict == Verdict::Holds) {
    cp.reason = "completely positive";
    return cp;
  }
  VerdictReport r;
  for (int s = 0; s < 16; ++s) {
    const CMatrix g = unvec(gaussianVector(ch.dimIn * ch.dimIn, splitmix64(seed ^ static_cast<std::uint64_t>(s + 1))),
                            ch.dimIn, ch.dimIn);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    const CMatrix img = applyChannel(ch, rho);
    const double scale = std::max(1.0, operatorNorm(img));
    if ((img - img.adjoint()).norm() > 1e-9 * scale ||
        minEigenvalue(hermitianPart(img)) < -1e-9 * scale) {
      r.verdict = Verdict::Fails;
      r.witness = {{"input", matrixToJson(rho)}, {"image", matrixToJson(img)}};
      r.reason = "a sampled positive input maps outside the positive cone";
      return r;
    }
  }
  r.verdict = Verdict::Inconclusive;
  r.reason = "positive on sampled inputs; no complete-positivity certificate";
  return r;
}

bool isNormalChannel(const Channel&) { return true; }

namespace {

// Row-major coordinate index (i,j) -> i*d+j versus column-stacked vec index
// j*d+i; the conversion is the (symmetric, involutive) swap permutation.
CMatrix vecToCoordsPerm(Eigen::Index d) {
  CMatrix p = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) p(i * d + j, j * d + i) = 1.0;
  return p;
}

}  // namespace

CBMap channelAsCBMap(const Channel& ch) {
  const CMatrix coeffs = vecToCoordsPerm(ch.dimOut) * ch.superop * vecToCoordsPerm(ch.dimIn);
  if (ch.picture == Picture::Schrodinger)
    return makeCBMap(traceClass(static_cast<int>(ch.dimIn)), traceClass(static_cast<int>(ch.dimOut)),
                     coeffs);
  return makeCBMap(matrixSpace(static_cast<int>(ch.dimIn)), matrixSpace(static_cast<int>(ch.dimOut)),
                   coeffs);
}

nlohmann::json hsCorrespondenceSuite(const Channel& ch, const OptimizerConfig& cfg, int cbLevel) {
  const Channel tr = transposeChannel(ch);

  double pairingDev = 0.0;
  for (Eigen::Index a = 0; a < ch.dimIn; ++a)
    for (Eigen::Index b = 0; b < ch.dimIn; ++b)
      for (Eigen::Index c = 0; c < ch.dimOut; ++c)
        for (Eigen::Index d = 0; d < ch.dimOut; ++d) {
          CMatrix x = CMatrix::Zero(ch.dimIn, ch.dimIn);
          x(a, b) = 1.0;
          CMatrix y = CMatrix::Zero(ch.dimOut, ch.dimOut);
          y(c, d) = 1.0;
          const Complex lhs = tracePairing(applyChannel(ch, x), y);
          const Complex rhs = tracePairing(x, applyChannel(tr, y));
          pairingDev = std::max(pairingDev, std::abs(lhs - rhs));
        }

  const VerdictReport cp = isCompletelyPositive(ch);
  const VerdictReport cpT = isCompletelyPositive(tr);
  const VerdictReport tp = isTracePreserving(ch);
  const VerdictReport unT = isUnital(tr);
  const VerdictReport un = isUnital(ch);
  const VerdictReport tpT = isTracePreserving(tr);

  const double cbA = cbNormLower(channelAsCBMap(ch), cbLevel, cfg).lower;
  const double cbB = cbNormLower(channelAsCBMap(tr), cbLevel, cfg).lower;

  const bool cptp = cp.verdict == Verdict::Holds && tp.verdict == Verdict::Holds;
  const bool ncpu =
      isNormalChannel(tr) && cpT.verdict == Verdict::Holds && unT.verdict == Verdict::Holds;

  const bool holds = pairingDev <= 1e-10 && cp.verdict == cpT.verdict &&
                     (tp.verdict == Verdict::Holds) == (unT.verdict == Verdict::Holds) &&
                     (un.verdict == Verdict::Holds) == (tpT.verdict == Verdict::Holds) &&
                     std::abs(cbA - cbB) <= 2e-4 && cptp == ncpu;

  return {{"pairingMaxDeviation", pairingDev},
          {"pairingHolds", pairingDev <= 1e-10},
          {"cp", verdictName(cp.verdict)},
          {"cpTranspose", verdictName(cpT.verdict)},
          {"cpAgree", cp.verdict == cpT.verdict},
          {"tp", verdictName(tp.verdict)},
          {"transposeUnital", verdictName(unT.verdict)},
          {"tpIffTransposeUnital", (tp.verdict == Verdict::Holds) == (unT.verdict == Verdict::Holds)},
          {"unital", verdictName(un.verdict)},
          {"transposeTp", verdictName(tpT.verdict)},
          {"unitalIffTransposeTp", (un.verdict == Verdict::Holds) == (tpT.verdict == Verdict::Holds)},
          {"cbLower", cbA},
          {"cbLowerTranspose", cbB},
          {"cbLevel", cbLevel},
          {"cbAgree", std::abs(cbA - cbB) <= 2e-4},
          {"cptp", cptp},
          {"transposeNcpu", ncpu},
          {"cptpIffTransposeNcpu", cptp == ncpu},
          {"holds", holds}};
}

nlohmann::json ccIffCpSuite(const Channel& ch, const OptimizerConfig& cfg) {
  const bool unital = isUnital(ch).verdict == Verdict::Holds;
  const bool tp = isTracePreserving(ch).verdict == Verdict::Holds;
  if (!unital && !tp) throw std::invalid_argument("neither unital nor TP");

  const VerdictReport cp = isCompletelyPositive(ch);
  // evaluate the contraction on the operator-algebra side, where the
  // matrix-codomain certificate makes the verdict decisive
  Channel heis = ch.picture == Picture::Heisenberg ? ch : transposeChannel(ch);
  std::string side = ch.picture == Picture::Heisenberg ? "given map" : "trace-pairing adjoint";
  const VerdictReport cc =
      isCompleteContraction(channelAsCBMap(heis), static_cast<int>(heis.dimOut), cfg);
  const bool agree = (cp.verdict == Verdict::Holds) == (cc.verdict == Verdict::Holds);
  return {{"cp", verdictName(cp.verdict)},
          {"completeContraction", verdictName(cc.verdict)},
          {"contractionSide", side},
          {"agree", agree},
          {"cpReason", cp.reason},
          {"contractionReason", cc.reason}};
}

Channel statePrep(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw std::invalid_argument("statePrep: not a density matrix");
  const double scale = std::max(1.0, operatorNorm(rho));
  if ((rho - rho.adjoint()).norm() > 1e-9 * scale ||
      minEigenvalue(hermitianPart(rho)) < -1e-9 * scale ||
      std::abs(rho.trace() - Complex(1.0)) > 1e-9)
    throw std::invalid_argument("statePrep: not a density matrix");
  CMatrix superop(rho.rows() * rho.rows(), 1);
  superop.col(0) = vec(rho);
  return makeChannel(1, rho.rows(), std::move(superop), Picture::Schrodinger);
}

Channel applyUnitary(const CMatrix& u) {
  if (u.rows() != u.cols() || u.rows() < 1 ||
      (u * u.adjoint() - CMatrix::Identity(u.rows(), u.rows())).norm() > 1e-9)
    throw std::invalid_argument("applyUnitary: not unitary");
  return makeChannel(u.rows(), u.rows(), kron(u.conjugate(), u), Picture::Schrodinger);
}

Channel measureBasis(int d) {
  if (d < 1) throw std::invalid_argument("measureBasis: dimension must be >= 1");
  CMatrix superop = CMatrix::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (Eigen::Index x = 0; x < d; ++x) superop(x * d + x, x * d + x) = 1.0;
  return makeChannel(d, d, std::move(superop), Picture::Schrodinger);
}

Channel composeChannels(const Channel& a, const Channel& b) {
  if (a.dimIn != b.dimOut || a.picture != b.picture)
    throw std::invalid_argument("composeChannels: shape or picture mismatch");
  return makeChannel(b.dimIn, a.dimOut, a.superop * b.superop, a.picture);
}

Channel kronChannels(const Channel& a, const Channel& b) {
  if (a.picture != b.picture) throw std::invalid_argument("kronChannels: picture mismatch");
  const Eigen::Index din = a.dimIn * b.dimIn, dout = a.dimOut * b.dimOut;
  CMatrix superop(dout * dout, din * din);
  for (Eigen::Index ka = 0; ka < a.dimIn; ++ka)
    for (Eigen::Index la = 0; la < a.dimIn; ++la)
      for (Eigen::Index kb = 0; kb < b.dimIn; ++kb)
        for (Eigen::Index lb = 0; lb < b.dimIn; ++lb) {
          CMatrix ea = CMatrix::Zero(a.dimIn, a.dimIn);
          ea(ka, la) = 1.0;
          CMatrix eb = CMatrix::Zero(b.dimIn, b.dimIn);
          eb(kb, lb) = 1.0;
          const CMatrix img = kron(applyChannel(a, ea), applyChannel(b, eb));
          superop.col((la * b.dimIn + lb) * din + ka * b.dimIn + kb) = vec(img);
        }
  return makeChannel(din, dout, std::move(superop), a.picture);
}

Channel randomCptpChannel(Eigen::Index dimIn, Eigen::Index dimOut, std::uint64_t seed) {
  if (dimIn < 1 || dimOut < 1)
    throw std::invalid_argument("randomCptpChannel: dimensions must be >= 1");
  const Eigen::Index env = dimIn;
  const CMatrix g = unvec(gaussianVector(dimOut * env * dimIn, splitmix64(seed ^ 0x9e3779b97f4a7c15ull)),
                          dimOut * env, dimIn);
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix v = qr.householderQ() * CMatrix::Identity(dimOut * env, dimIn);
  CMatrix superop = CMatrix::Zero(dimOut * dimOut, dimIn * dimIn);
  for (Eigen::Index e = 0; e < env; ++e) {
    CMatrix k(dimOut, dimIn);
    for (Eigen::Index o = 0; o < dimOut; ++o) k.row(o) = v.row(o * env + e);
    superop += kron(k.conjugate(), k);
  }
  return makeChannel(dimIn, dimOut, std::move(superop), Picture::Schrodinger);
}

nlohmann::json channelToJson(const Channel& ch) {
  return {{"dimIn", ch.dimIn},
          {"dimOut", ch.dimOut},
          {"picture", pictureName(ch.picture)},
          {"superop", matrixToJson(ch.superop)}};
}

Channel channelFromJson(const nlohmann::json& j) {
  const std::string p = j.at("picture").get<std::string>();
  if (p != "schrodinger" && p != "heisenberg")
    throw std::invalid_argument("channelFromJson: unknown picture");
  return makeChannel(j.at("dimIn").get<Eigen::Index>(), j.at("dimOut").get<Eigen::Index>(),
                     matrixFromJson(j.at("superop")),
                     p == "schrodinger" ? Picture::Schrodinger : Picture::Heisenberg);
}

nlohmann::json choiToJson(const Channel& ch) {
  return {{"choi", matrixToJson(choiOf(ch))}, {"convention", "col-stacking"}};
}

}  // namespace oscat

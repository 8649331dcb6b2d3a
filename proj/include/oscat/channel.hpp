#pragma once

#include "oscat/cbmap.hpp"

namespace oscat {

enum class Picture { Schrodinger, Heisenberg };

std::string pictureName(Picture p);

/// Linear map between matrix algebras as a superoperator on column-stacked
/// vectorizations: vec(AXB) = (B^T (x) A) vec(X).
struct Channel {
  Eigen::Index dimIn = 0;
  Eigen::Index dimOut = 0;
  CMatrix superop;  // dimOut^2 x dimIn^2
  Picture picture = Picture::Schrodinger;
};

Channel makeChannel(Eigen::Index dimIn, Eigen::Index dimOut, CMatrix superop, Picture picture);

CMatrix applyChannel(const Channel& ch, const CMatrix& x);

/// Choi matrix sum_ij e_ij (x) ch(e_ij), of size (dimIn*dimOut)^2.
CMatrix choiOf(const Channel& ch);

/// Adjoint with respect to the trace pairing; swaps the picture.
Channel transposeChannel(const Channel& ch);

Complex tracePairing(const CMatrix& x, const CMatrix& b);

VerdictReport isCompletelyPositive(const Channel& ch);
VerdictReport isTracePreserving(const Channel& ch);
VerdictReport isUnital(const Channel& ch);
VerdictReport isPositive(const Channel& ch, std::uint64_t seed = 20240817u);
/// Vacuous in finite dimension: every bounded map has a trace-pairing adjoint.
bool isNormalChannel(const Channel& ch);

/// The channel as a cb map between trace classes (Schrodinger) or full
/// matrix spaces (Heisenberg), converting vectorization conventions.
CBMap channelAsCBMap(const Channel& ch);

/// Executable form of the Heisenberg-Schrodinger correspondence: pairing
/// adjunction on bases, CP/TP/unital transfer, and matched cb lower bounds.
nlohmann::json hsCorrespondenceSuite(const Channel& ch, const OptimizerConfig& cfg = {},
                                     int cbLevel = 1);

/// Cross-check of the Choi positivity verdict against the complete
/// contraction verdict for unital or trace-preserving maps.
nlohmann::json ccIffCpSuite(const Channel& ch, const OptimizerConfig& cfg = {});

Channel statePrep(const CMatrix& rho);
Channel applyUnitary(const CMatrix& u);
Channel measureBasis(int d);

Channel composeChannels(const Channel& a, const Channel& b);  // a after b
Channel kronChannels(const Channel& a, const Channel& b);

Channel randomCptpChannel(Eigen::Index dimIn, Eigen::Index dimOut, std::uint64_t seed);

nlohmann::json channelToJson(const Channel& ch);
Channel channelFromJson(const nlohmann::json& j);
nlohmann::json choiToJson(const Channel& ch);

}  // namespace oscat

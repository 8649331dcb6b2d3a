#include "oscat/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

namespace oscat {

OptimizerConfig optimizerConfigOf(const RunConfig& rc) {
  OptimizerConfig cfg;
  cfg.seed = rc.seed;
  cfg.restarts = rc.restarts;
  return cfg;
}

nlohmann::json runConfigToJson(const RunConfig& rc) {
  return {{"seed", rc.seed},
          {"maxLevel", rc.maxLevel},
          {"restarts", rc.restarts},
          {"tolAlgebraic", rc.tolAlgebraic},
          {"tolOptimized", rc.tolOptimized}};
}

namespace {

std::string utcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json makeReport(const std::string& command, const RunConfig& rc,
                          const nlohmann::json& input, const nlohmann::json& body,
                          const std::vector<std::string>& references) {
  nlohmann::json out;
  out["command"] = command;
  out["config"] = runConfigToJson(rc);
  if (!input.is_null()) out["input"] = input;
  out["report"] = body;
  if (!references.empty()) out["references"] = references;
  if (rc.timestamp) out["timestamp"] = utcTimestamp();
  return out;
}

std::string renderReport(const nlohmann::json& report) { return report.dump(2) + "\n"; }

nlohmann::json boundToJson(double value) {
  if (std::isfinite(value)) return value;
  return "inf";
}

nlohmann::json estimateToJson(const NormEstimate& est) {
  nlohmann::json out;
  out["lower"] = est.lower;
  out["upper"] = boundToJson(est.upper);
  out["converged"] = est.converged;
  if (!est.witness.is_null()) out["witness"] = est.witness;
  return out;
}

int exitCodeFor(Verdict v) {
  switch (v) {
    case Verdict::Holds: return 0;
    case Verdict::Fails: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

Verdict combineVerdicts(const std::vector<Verdict>& vs) {
  Verdict out = Verdict::Holds;
  for (Verdict v : vs) {
    if (v == Verdict::Fails) return Verdict::Fails;
    if (v == Verdict::Inconclusive) out = Verdict::Inconclusive;
  }
  return out;
}

namespace {

struct SweepSpace {
  std::string name;
  OperatorSpace space;
};

std::vector<SweepSpace> sweepSpaces() {
  const OperatorSpace m2 = matrixSpace(2);
  CVector offDiag = CVector::Zero(4);
  offDiag(1) = 1.0;
  return {{"matrixSpace(2)", m2},
          {"traceClass(2)", traceClass(2)},
          {"columnHilbert(3)", columnHilbert(3)},
          {"minQuant(matrixSpace(2))", minQuant(m2)},
          {"maxQuant(matrixSpace(2))", maxQuant(m2)},
          {"sum1(matrixSpace(2), traceClass(2))", directSum1({m2, traceClass(2)})},
          {"sumInf(matrixSpace(2), traceClass(2))", directSumInf({m2, traceClass(2)})},
          {"quotient(matrixSpace(2), span{e01})", quotientSpace(m2, {offDiag})}};
}

CMatrix gaussianMatrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  return unvec(gaussianVector(rows * cols, seed), rows, cols);
}

}  // namespace

nlohmann::json axiomSweep(int samplesPerSpace, int maxLevel, const OptimizerConfig& cfg,
                          double tol) {
  const auto spaces = sweepSpaces();
  nlohmann::json rows = nlohmann::json::array();
  bool allHold = true;
  // level pairs for the direct-sum axiom; the summed level stays <= maxLevel
  std::vector<std::pair<int, int>> pairs;
  for (int n = 1; n < maxLevel; ++n)
    for (int m = 1; n + m <= maxLevel; ++m) pairs.emplace_back(n, m);
  if (pairs.empty()) pairs.emplace_back(1, 1);

  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const OperatorSpace& X = spaces[si].space;
    double m1Dev = 0.0, m2Viol = 0.0;
    for (int s = 0; s < samplesPerSpace; ++s) {
      const std::uint64_t base = splitmix64(cfg.seed + 1000003u * si + 17u * s);
      const auto [nl, ml] = pairs[static_cast<std::size_t>(s) % pairs.size()];

      const ElementMatrix x = randomElement(X.dim(), nl, splitmix64(base + 1));
      const ElementMatrix y = randomElement(X.dim(), ml, splitmix64(base + 2));
      const double nx = X.normValue(x, cfg);
      const double ny = X.normValue(y, cfg);
      const double nsum = X.normValue(directSumElement(x, y), cfg);
      const double target = std::max(nx, ny);
      m1Dev = std::max(m1Dev, std::abs(nsum - target) / std::max(1.0, target));

      const int rows2 = 1 + s % maxLevel;
      const CMatrix alpha = gaussianMatrix(rows2, x.level, splitmix64(base + 3));
      const CMatrix beta = gaussianMatrix(x.level, rows2, splitmix64(base + 4));
      const double lhs = X.normValue(scalarSandwich(alpha, x, beta), cfg);
      const double rhs = operatorNorm(alpha) * nx * operatorNorm(beta);
      m2Viol = std::max(m2Viol, std::max(0.0, lhs - rhs) / std::max(1.0, rhs));
    }
    const bool holds = m1Dev <= tol && m2Viol <= tol;
    allHold = allHold && holds;
    rows.push_back({{"space", spaces[si].name},
                    {"exactNorms", X.exactNorms()},
                    {"m1MaxDeviation", m1Dev},
                    {"m2MaxViolation", m2Viol},
                    {"holds", holds}});
  }
  return {{"samplesPerSpace", samplesPerSpace},
          {"maxLevel", maxLevel},
          {"tolerance", tol},
          {"spaces", rows},
          {"holds", allHold}};
}

}  // namespace oscat

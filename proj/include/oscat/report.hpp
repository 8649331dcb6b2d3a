#pragma once

#include <string>
#include <vector>

#include "oscat/cbmap.hpp"

namespace oscat {

/// Run-wide settings shared by all CLI subcommands.
struct RunConfig {
  std::uint64_t seed = 20240817u;
  int maxLevel = 3;
  int restarts = 16;
  double tolAlgebraic = 1e-9;
  double tolOptimized = 1e-6;
  bool timestamp = true;
};

OptimizerConfig optimizerConfigOf(const RunConfig& rc);
nlohmann::json runConfigToJson(const RunConfig& rc);

/// Report envelope: command, config echo, input echo, body, reference labels
/// and (unless suppressed) a UTC timestamp.
nlohmann::json makeReport(const std::string& command, const RunConfig& rc,
                          const nlohmann::json& input, const nlohmann::json& body,
                          const std::vector<std::string>& references);

/// Stable serialization used for byte-identical report comparisons.
std::string renderReport(const nlohmann::json& report);

/// JSON value for a possibly infinite upper bound.
nlohmann::json boundToJson(double value);

nlohmann::json estimateToJson(const NormEstimate& est);

int exitCodeFor(Verdict v);
Verdict combineVerdicts(const std::vector<Verdict>& vs);

/// M1 (direct sums take the max) and M2 (scalar sandwich contractivity)
/// across the standard constructed spaces, at levels <= maxLevel.
nlohmann::json axiomSweep(int samplesPerSpace, int maxLevel, const OptimizerConfig& cfg,
                          double tol = 1e-6);

}  // namespace oscat

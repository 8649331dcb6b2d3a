#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscat/matrix.hpp"

namespace oscat {

struct OptimizerConfig {
  std::uint64_t seed = 20240817u;
  int restarts = 16;
  int maxIterations = 300;
  double stepTolerance = 1e-10;
  double valueTolerance = 1e-12;
};

/// Interval estimate of a supremum/norm. The lower bound is certified by the
/// recorded witness; the upper bound is +inf unless an analytic cap applies.
struct NormEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  nlohmann::json witness;
  bool converged = false;
};

/// Unit ball of a positively homogeneous norm on a complex coordinate space.
/// linMax, when available, returns an exact maximizer of Re(sum_k w_k x_k)
/// over the ball and turns the ascent into a conditional-gradient scheme.
struct BallSpec {
  std::function<double(const CVector&)> norm;
  std::function<CVector(const CVector&)> linMax;
};

/// Objective with optional first-order model: f(x + d) ~ f(x) + Re(sum_k w_k d_k)
/// where w = linearization(x).
struct ObjectiveSpec {
  Eigen::Index dim = 0;
  std::function<double(const CVector&)> eval;
  std::function<CVector(const CVector&)> linearization;
};

/// Multi-restart ascent of f over the unit ball of ballNorm. Restart r draws
/// from a stream derived from config.seed and r, so results are reproducible
/// and monotone in the number of restarts. Warm starts are normalized onto
/// the ball and tried before the random restarts.
NormEstimate maximizeOverUnitBall(const ObjectiveSpec& f, const BallSpec& ball,
                                  const OptimizerConfig& config,
                                  const std::vector<CVector>& warmStarts = {});

/// Unconstrained minimization of a convex (possibly nonsmooth) objective by
/// subgradient descent with backtracking. Returns the best point found.
struct ConvexMinResult {
  CVector point;
  double value = 0.0;
};
ConvexMinResult minimizeConvex(const ObjectiveSpec& f, const CVector& start,
                               int maxIterations = 400, double tol = 1e-10);

std::uint64_t splitmix64(std::uint64_t x);

/// Reduced-effort configuration for nested estimates (ball normalizations and
/// other inner suprema). Derives its seed from cfg.seed deterministically.
OptimizerConfig innerConfig(const OptimizerConfig& cfg);

/// Deterministic standard-normal complex vector for restart streams.
CVector gaussianVector(Eigen::Index dim, std::uint64_t seed);

}  // namespace oscat

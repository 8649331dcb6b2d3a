#include "oscat/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscat {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {

// 53-bit uniform in [0, 1).
double uniform01(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

double gaussian(std::uint64_t& state) {
  // Box-Muller; the pair is consumed as a single draw for simplicity.
  double u1 = uniform01(state);
  double u2 = uniform01(state);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

CVector gaussianVectorFromState(Eigen::Index dim, std::uint64_t& state) {
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gaussian(state), gaussian(state));
  return v;
}

}  // namespace

OptimizerConfig innerConfig(const OptimizerConfig& cfg) {
  OptimizerConfig inner = cfg;
  inner.seed = splitmix64(cfg.seed ^ 0x7a31b5c2d4e6f801ull);
  inner.restarts = std::max(4, cfg.restarts / 4);
  inner.maxIterations = std::max(120, cfg.maxIterations / 2);
  return inner;
}

CVector gaussianVector(Eigen::Index dim, std::uint64_t seed) {
  std::uint64_t state = splitmix64(seed);
  return gaussianVectorFromState(dim, state);
}

namespace {

CVector normalizeOntoBall(const BallSpec& ball, const CVector& x) {
  const double n = ball.norm(x);
  if (!(n > 1e-14)) return x;  // zero-ish points stay put
  return x / n;
}

double safeEval(const ObjectiveSpec& f, const CVector& x) {
  const double v = f.eval(x);
  if (!std::isfinite(v)) throw std::runtime_error("objective diverged");
  return v;
}

struct AscentResult {
  CVector point;
  double value = -1.0;
  bool converged = false;
};

AscentResult ascendFrom(const ObjectiveSpec& f, const BallSpec& ball, CVector x,
                        const OptimizerConfig& config, std::uint64_t& rngState) {
  x = normalizeOntoBall(ball, x);
  double best = safeEval(f, x);
  bool converged = false;
  double step = 0.5;
  int stall = 0;
  for (int iter = 0; iter < config.maxIterations; ++iter) {
    CVector candidate;
    bool haveCandidate = false;
    if (f.linearization) {
      const CVector w = f.linearization(x);
      if (ball.linMax) {
        candidate = ball.linMax(w);
      } else {
        candidate = normalizeOntoBall(ball, x + step * w.conjugate());
      }
      haveCandidate = true;
    }
    bool improved = false;
    if (haveCandidate) {
      const double v = safeEval(f, candidate);
      if (v > best + config.valueTolerance) {
        const double moved = (candidate - x).norm();
        x = candidate;
        best = v;
        improved = true;
        stall = 0;
        if (moved < config.stepTolerance) {
          converged = true;
          break;
        }
      }
    }
    if (!improved) {
      // Derivative-free fallback: seeded random perturbation on the ball.
      bool found = false;
      for (int t = 0; t < 4 && !found; ++t) {
        const CVector probe =
            normalizeOntoBall(ball, x + step * gaussianVectorFromState(x.size(), rngState));
        const double v = safeEval(f, probe);
        if (v > best + config.valueTolerance) {
          x = probe;
          best = v;
          found = true;
          stall = 0;
        }
      }
      if (!found) {
        step *= 0.5;
        ++stall;
        if (step < config.stepTolerance || stall >= 6) {
          converged = true;
          break;
        }
      }
    }
  }
  return {std::move(x), best, converged};
}

}  // namespace

NormEstimate maximizeOverUnitBall(const ObjectiveSpec& f, const BallSpec& ball,
                                  const OptimizerConfig& config,
                                  const std::vector<CVector>& warmStarts) {
  if (config.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  NormEstimate out;
  out.lower = 0.0;
  out.converged = true;
  CVector bestPoint = CVector::Zero(f.dim);
  int bestRun = -1;
  bool haveBest = false;

  const int totalRuns = static_cast<int>(warmStarts.size()) + config.restarts;
  for (int run = 0; run < totalRuns; ++run) {
    std::uint64_t rngState = splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(run) + 1));
    CVector start;
    if (run < static_cast<int>(warmStarts.size())) {
      start = warmStarts[static_cast<std::size_t>(run)];
    } else {
      start = gaussianVectorFromState(f.dim, rngState);
    }
    AscentResult r = ascendFrom(f, ball, start, config, rngState);
    if (!r.converged) out.converged = false;
    if (!haveBest || r.value > out.lower) {
      out.lower = r.value;
      bestPoint = r.point;
      bestRun = run;
      haveBest = true;
    }
  }
  out.witness = {{"coords", vectorToJson(bestPoint)}, {"value", out.lower}, {"restart", bestRun}};
  return out;
}

ConvexMinResult minimizeConvex(const ObjectiveSpec& f, const CVector& start, int maxIterations,
                               double tol) {
  CVector x = start;
  double best = safeEval(f, x);
  double step = 1.0;
  for (int iter = 0; iter < maxIterations; ++iter) {
    if (!f.linearization) break;
    const CVector w = f.linearization(x);
    const double gnorm = w.norm();
    if (gnorm < tol) break;
    bool improved = false;
    double s = step;
    for (int bt = 0; bt < 30; ++bt) {
      const CVector cand = x - s * w.conjugate();
      const double v = safeEval(f, cand);
      if (v < best - 1e-15) {
        x = cand;
        best = v;
        step = s * 1.5;
        improved = true;
        break;
      }
      s *= 0.5;
    }
    if (!improved) break;
  }
  return {std::move(x), best};
}

}  // namespace oscat

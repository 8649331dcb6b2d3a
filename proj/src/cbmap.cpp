#include "oscat/cbmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscat {

CBMap makeCBMap(OperatorSpace domain, OperatorSpace codomain, CMatrix coeffs) {
  if (coeffs.rows() != codomain.dim() || coeffs.cols() != domain.dim())
    throw std::invalid_argument("makeCBMap: coefficient shape mismatch");
  requireFinite(coeffs, "makeCBMap");
  return {std::move(domain), std::move(codomain), std::move(coeffs)};
}

CBMap identityMap(const OperatorSpace& space) {
  return {space, space, CMatrix::Identity(space.dim(), space.dim())};
}

CBMap zeroMap(const OperatorSpace& domain, const OperatorSpace& codomain) {
  return {domain, codomain, CMatrix::Zero(codomain.dim(), domain.dim())};
}

CBMap transposeMap(int k) {
  OperatorSpace m = matrixSpace(k);
  CMatrix c = CMatrix::Zero(m.dim(), m.dim());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c(static_cast<Eigen::Index>(j) * k + i, static_cast<Eigen::Index>(i) * k + j) = 1.0;
  return {m, m, std::move(c)};
}

ElementMatrix amplify(const CBMap& u, const ElementMatrix& x) {
  if (x.dim() != u.domain.dim()) throw std::invalid_argument("amplify: element not in the domain");
  ElementMatrix y = ElementMatrix::zero(x.level, u.codomain.dim());
  for (std::size_t e = 0; e < x.coords.size(); ++e) y.coords[e] = u.coeffs * x.coords[e];
  return y;
}

namespace {

// First-order model of the codomain norm at a given image element, when one
// is available (exact operator-norm or level-1 trace-norm codomains).
std::function<CVector(const CVector&)> imageLinearization(const CBMap& u, int n) {
  const Eigen::Index dd = u.domain.dim();
  if (u.codomain.kind() == SpaceKind::Concrete) {
    const OperatorSpace cod = u.codomain;
    const CMatrix coeffs = u.coeffs;
    // Assembled images of the domain basis vectors.
    std::vector<CMatrix> chat(static_cast<std::size_t>(dd));
    for (Eigen::Index c = 0; c < dd; ++c) {
      CMatrix m = CMatrix::Zero(cod.ambientDim(), cod.ambientDim());
      for (Eigen::Index r = 0; r < cod.dim(); ++r) m += coeffs(r, c) * cod.basis()[static_cast<std::size_t>(r)];
      chat[static_cast<std::size_t>(c)] = m;
    }
    const Eigen::Index d = cod.ambientDim();
    const CBMap uc = u;
    return [uc, chat, n, d, dd](const CVector& v) {
      const ElementMatrix x = unflattenElement(n, dd, v);
      const SingularPair sp = topSingularPair(uc.codomain.assemble(amplify(uc, x)));
      CVector w(static_cast<Eigen::Index>(n) * n * dd);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const CVector ui = sp.left.segment(i * d, d);
          const CVector vj = sp.right.segment(j * d, d);
          for (Eigen::Index c = 0; c < dd; ++c)
            w((static_cast<Eigen::Index>(i) * n + j) * dd + c) =
                ui.adjoint() * chat[static_cast<std::size_t>(c)] * vj;
        }
      return w;
    };
  }
  if (n == 1 && isTraceClassLike(u.codomain)) {
    const Eigen::Index k = parentOf(u.codomain).ambientDim();
    const CMatrix pt = dualPairingOf(u.codomain).transpose();
    const CMatrix coeffs = u.coeffs;
    return [k, pt, coeffs](const CVector& v) {
      CMatrix yhat(k, k);
      const CVector py = pt * (coeffs * v);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) yhat(i, j) = py(i * k + j);
      const CMatrix g = polarFactor(yhat);
      CVector gflat(k * k);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) gflat(i * k + j) = g(i, j);
      return CVector(coeffs.transpose() * pt.transpose() * gflat.conjugate());
    };
  }
  return nullptr;
}

}  // namespace

NormEstimate amplifiedNorm(const CBMap& u, int n, const OptimizerConfig& cfg,
                           const std::vector<ElementMatrix>& warmStarts) {
  if (n < 1) throw std::invalid_argument("amplifiedNorm: level must be >= 1");
  const Eigen::Index dd = u.domain.dim();
  if (dd == 0 || u.codomain.dim() == 0) {
    NormEstimate e;
    e.upper = 0.0;
    e.converged = true;
    return e;
  }
  const OptimizerConfig inner = innerConfig(cfg);
  const CBMap uc = u;
  ObjectiveSpec f;
  f.dim = static_cast<Eigen::Index>(n) * n * dd;
  f.eval = [uc, n, dd, inner](const CVector& v) {
    return uc.codomain.normValue(amplify(uc, unflattenElement(n, dd, v)), inner);
  };
  f.linearization = imageLinearization(u, n);

  std::vector<CVector> starts;
  for (const auto& w : warmStarts)
    if (w.level == n && w.dim() == dd) starts.push_back(flattenElement(w));

  NormEstimate e = maximizeOverUnitBall(f, u.domain.unitBall(n, inner), cfg, starts);
  e.witness["level"] = n;
  return e;
}

NormEstimate cbNormLower(const CBMap& u, int maxLevel, const OptimizerConfig& cfg,
                         const std::vector<ElementMatrix>& warmStarts) {
  if (maxLevel < 1) throw std::invalid_argument("cbNormLower: maxLevel must be >= 1");
  NormEstimate best;
  best.converged = true;
  int smithLevel = 0;
  if (isFullMatrixSpace(u.codomain)) smithLevel = static_cast<int>(u.codomain.ambientDim());
  std::optional<ElementMatrix> carried;
  for (int n = 1; n <= maxLevel; ++n) {
    std::vector<ElementMatrix> starts = warmStarts;
    if (carried) starts.push_back(padElement(*carried, n));
    NormEstimate e = amplifiedNorm(u, n, cfg, starts);
    if (e.witness.contains("coords"))
      carried = unflattenElement(n, u.domain.dim(), vectorFromJson(e.witness.at("coords")));
    if (e.lower >= best.lower) {
      best.lower = e.lower;
      best.witness = e.witness;
    }
    best.converged = best.converged && e.converged;
    if (smithLevel > 0 && n == smithLevel && e.converged) {
      best.upper = best.lower;
      best.witness["certificate"] =
          "codomain is a full matrix space; cb norm attained at level " + std::to_string(smithLevel);
      break;
    }
  }
  return best;
}

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

VerdictReport isCompleteContraction(const CBMap& u, int maxLevel, const OptimizerConfig& cfg,
                                    double tol) {
  NormEstimate e = cbNormLower(u, maxLevel, cfg);
  VerdictReport r;
  if (e.lower > 1.0 + tol) {
    r.verdict = Verdict::Fails;
    r.witness = e.witness;
    r.reason = "amplified norm " + std::to_string(e.lower) + " exceeds 1";
    return r;
  }
  if (std::isfinite(e.upper) && e.upper <= 1.0 + tol) {
    r.verdict = Verdict::Holds;
    r.witness = e.witness;
    r.reason = "certified cb norm " + std::to_string(e.upper) + " <= 1";
    return r;
  }
  r.verdict = Verdict::Inconclusive;
  r.witness = e.witness;
  r.reason = "best lower bound " + std::to_string(e.lower) + " <= 1 but no finite certificate";
  return r;
}

VerdictReport isCompleteIsometry(const CBMap& u, int maxLevel, const OptimizerConfig& cfg,
                                 double tol) {
  VerdictReport r;
  const OptimizerConfig inner = innerConfig(cfg);
  for (int n = 1; n <= maxLevel; ++n) {
    for (int s = 0; s < 4; ++s) {
      const std::uint64_t seed = splitmix64(cfg.seed ^ (static_cast<std::uint64_t>(n) << 8) ^ static_cast<std::uint64_t>(s));
      ElementMatrix x = randomElement(u.domain.dim(), n, seed);
      const double nx = u.domain.normValue(x, inner);
      const double ny = u.codomain.normValue(amplify(u, x), inner);
      if (std::abs(nx - ny) > tol * std::max(1.0, nx)) {
        r.verdict = Verdict::Fails;
        r.witness = {{"level", n}, {"coords", vectorToJson(flattenElement(x))},
                     {"domainNorm", nx}, {"codomainNorm", ny}};
        r.reason = "norm changes on a sampled element";
        return r;
      }
    }
  }
  if (u.domain.exactNorms() && u.codomain.exactNorms()) {
    r.verdict = Verdict::Holds;
    r.reason = "norms agree on sampled elements up to level " + std::to_string(maxLevel) +
               " with exact oracles";
  } else {
    r.verdict = Verdict::Inconclusive;
    r.reason = "norms agree on sampled elements but rely on optimizer estimates";
  }
  return r;
}

CBMap compose(const CBMap& u, const CBMap& v) {
  if (u.domain.dim() != v.codomain.dim())
    throw std::invalid_argument("compose: domain/codomain mismatch");
  return {v.domain, u.codomain, u.coeffs * v.coeffs};
}

namespace {

CMatrix differenceOf(const CBMap& f, const CBMap& g) {
  if (f.domain.dim() != g.domain.dim() || f.codomain.dim() != g.codomain.dim())
    throw std::invalid_argument("equalizer: maps must be parallel");
  return f.coeffs - g.coeffs;
}

}  // namespace

OperatorSpace equalizer(const CBMap& f, const CBMap& g) {
  const CMatrix d = differenceOf(f, g);
  Eigen::JacobiSVD<CMatrix> svd(d, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(smax, 1.0)) ++rank;
  const Eigen::Index nullDim = d.cols() - rank;
  if (nullDim == 0) return zeroSpace();
  return subspaceOf(f.domain, svd.matrixV().rightCols(nullDim));
}

OperatorSpace coequalizer(const CBMap& f, const CBMap& g) {
  const CMatrix d = differenceOf(f, g);
  Eigen::JacobiSVD<CMatrix> svd(d, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  std::vector<CVector> range;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(smax, 1.0)) range.push_back(svd.matrixU().col(i));
  return quotientSpace(f.codomain, range);
}

nlohmann::json mapToJson(const CBMap& u) {
  return {{"domain", u.domain.describe()},
          {"codomain", u.codomain.describe()},
          {"coeffs", matrixToJson(u.coeffs)}};
}

CBMap mapFromJson(const nlohmann::json& j) {
  return makeCBMap(spaceFromJson(j.at("domain")), spaceFromJson(j.at("codomain")),
                   matrixFromJson(j.at("coeffs")));
}

nlohmann::json verdictToJson(const VerdictReport& r) {
  return {{"verdict", verdictName(r.verdict)}, {"witness", r.witness}, {"reason", r.reason}};
}

}  // namespace oscat

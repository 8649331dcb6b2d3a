#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oscat/cbmap.hpp"

using namespace oscat;

namespace {

// SWAP-patterned element of M_2(M_2): entry (i,j) = E_ji, assembling to the
// flip operator with norm 1. The entrywise transpose assembles to the
// rank-one pattern with norm 2.
ElementMatrix swapElement() {
  ElementMatrix x = ElementMatrix::zero(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) x.at(i, j)(static_cast<Eigen::Index>(j) * 2 + i) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("amplify basics") {
  OperatorSpace m = matrixSpace(2);
  CBMap id = identityMap(m);
  ElementMatrix x = randomElement(4, 2, 7);
  ElementMatrix y = amplify(id, x);
  for (std::size_t e = 0; e < x.coords.size(); ++e) CHECK((x.coords[e] - y.coords[e]).norm() == 0.0);

  CBMap z = zeroMap(m, m);
  ElementMatrix zy = amplify(z, x);
  for (const auto& c : zy.coords) CHECK(c.norm() == 0.0);

  // transpose of the SWAP pattern assembles to norm 2
  CBMap t = transposeMap(2);
  ElementMatrix sw = swapElement();
  CHECK(m.normValue(sw) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.normValue(amplify(t, sw)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("amplified norms of the transpose map") {
  CBMap t = transposeMap(2);
  OptimizerConfig cfg;
  CHECK(amplifiedNorm(t, 1, cfg).lower == doctest::Approx(1.0).epsilon(1e-9));
  NormEstimate e2 = amplifiedNorm(t, 2, cfg, {swapElement()});
  CHECK(e2.lower == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cb norm lower bounds and the matrix-codomain certificate") {
  OptimizerConfig cfg;
  CBMap t = transposeMap(2);
  NormEstimate e = cbNormLower(t, 2, cfg, {swapElement()});
  CHECK(e.lower == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(e.upper == e.lower);
  CHECK(e.witness.contains("certificate"));

  CBMap id = identityMap(matrixSpace(2));
  NormEstimate ei = cbNormLower(id, 3, cfg);
  CHECK(ei.lower == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ei.upper == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("level monotonicity of amplified norms") {
  CBMap t = transposeMap(2);
  OptimizerConfig cfg;
  cfg.restarts = 8;
  double prev = 0.0;
  std::vector<ElementMatrix> carry;
  for (int n = 1; n <= 3; ++n) {
    NormEstimate e = cbNormLower(t, n, cfg);
    CHECK(e.lower >= prev - 1e-12);
    prev = e.lower;
  }
}

TEST_CASE("verdicts") {
  OptimizerConfig cfg;
  CHECK(isCompleteContraction(identityMap(matrixSpace(2)), 2, cfg).verdict == Verdict::Holds);

  CBMap twice = makeCBMap(scalarSpace(), scalarSpace(), 2.0 * CMatrix::Identity(1, 1));
  VerdictReport r = isCompleteContraction(twice, 1, cfg);
  CHECK(r.verdict == Verdict::Fails);

  VerdictReport rt = isCompleteContraction(transposeMap(2), 2, cfg);
  CHECK(rt.verdict == Verdict::Fails);

  CHECK(isCompleteIsometry(identityMap(matrixSpace(2)), 2, cfg).verdict == Verdict::Holds);
  CHECK(isCompleteIsometry(zeroMap(matrixSpace(2), matrixSpace(2)), 1, cfg).verdict ==
        Verdict::Fails);

  // inclusion of a concrete subspace is a complete isometry
  OperatorSpace m = matrixSpace(2);
  CMatrix inj(4, 2);
  inj.setZero();
  inj(0, 0) = 1;
  inj(3, 1) = 1;
  OperatorSpace s = subspaceOf(m, inj);
  CBMap incl = makeCBMap(s, m, inj);
  CHECK(isCompleteIsometry(incl, 2, cfg).verdict == Verdict::Holds);
}

TEST_CASE("composition") {
  CBMap t = transposeMap(2);
  CBMap tt = compose(t, t);
  CHECK((tt.coeffs - CMatrix::Identity(4, 4)).norm() == 0.0);

  OptimizerConfig cfg;
  NormEstimate et = cbNormLower(t, 2, cfg, {swapElement()});
  NormEstimate ett = cbNormLower(tt, 2, cfg);
  CHECK(ett.lower <= et.upper * et.upper + 1e-9);
}

TEST_CASE("equalizer and coequalizer") {
  OperatorSpace m = matrixSpace(2);
  CBMap t = transposeMap(2);
  CBMap id = identityMap(m);
  // transpose agrees with the identity exactly on symmetric matrices
  OperatorSpace eq = equalizer(t, id);
  CHECK(eq.dim() == 3);
  OperatorSpace coeq = coequalizer(t, id);
  CHECK(coeq.dim() == 3);

  CHECK(equalizer(id, id).dim() == 4);
  CHECK(coequalizer(id, id).dim() == 4);
  CHECK(equalizer(zeroMap(m, m), id).kind() == SpaceKind::Zero);
}

TEST_CASE("schrodinger-side maps on trace class") {
  // transpose as a map T_2 -> T_2 also has amplified norm 1 at level 1
  OperatorSpace t2 = traceClass(2);
  CBMap t = makeCBMap(t2, t2, transposeMap(2).coeffs);
  OptimizerConfig cfg;
  CHECK(amplifiedNorm(t, 1, cfg).lower == doctest::Approx(1.0).epsilon(1e-8));
  CBMap idt = identityMap(t2);
  CHECK(amplifiedNorm(idt, 1, cfg).lower == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("map json round trip") {
  CBMap t = transposeMap(2);
  CBMap r = mapFromJson(mapToJson(t));
  CHECK((r.coeffs - t.coeffs).norm() == 0.0);
  CHECK(r.domain.dim() == 4);
}

TEST_CASE("invalid map construction") {
  CHECK_THROWS_AS(makeCBMap(matrixSpace(2), matrixSpace(2), CMatrix::Zero(3, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(compose(transposeMap(2), identityMap(scalarSpace())), std::invalid_argument);
}

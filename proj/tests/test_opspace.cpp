#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oscat/opspace.hpp"

using namespace oscat;

namespace {

ElementMatrix level1(const CVector& c) {
  ElementMatrix x;
  x.level = 1;
  x.coords = {c};
  return x;
}

CVector coords2(Complex a, Complex b, Complex c, Complex d) {
  CVector v(4);
  v << a, b, c, d;
  return v;
}

// Matrix-unit coordinate element of M_n(M_k) with entry (i,j) equal to E_{p(i,j), q(i,j)}.
ElementMatrix transposeElement(int n) {
  ElementMatrix x = ElementMatrix::zero(n, static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x.at(i, j)(static_cast<Eigen::Index>(i) * n + j) = 1.0;
  return x;
}

ElementMatrix identityElement(int n) {
  ElementMatrix x = ElementMatrix::zero(n, static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x.at(i, j)(static_cast<Eigen::Index>(j) * n + i) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("concrete matrix space norms are exact") {
  OperatorSpace m = matrixSpace(2);
  NormEstimate e = m.norm(level1(coords2(1, 2, 3, 4)));
  CHECK(e.lower == doctest::Approx(5.464985704219043).epsilon(1e-12));
  CHECK(e.upper == e.lower);
  CHECK(m.exactNorms());

  ElementMatrix x = randomElement(4, 2, 101);
  ElementMatrix y = randomElement(4, 2, 102);
  // M1: direct sums take the max
  double nx = m.normValue(x), ny = m.normValue(y);
  CHECK(m.normValue(directSumElement(x, y)) == doctest::Approx(std::max(nx, ny)).epsilon(1e-12));
  // M2: scalar sandwich is contractive after normalization
  CMatrix alpha = unvec(gaussianVector(4, 103), 2, 2);
  CMatrix beta = unvec(gaussianVector(4, 104), 2, 2);
  CHECK(m.normValue(scalarSandwich(alpha, x, beta)) <=
        operatorNorm(alpha) * nx * operatorNorm(beta) + 1e-12);
}

TEST_CASE("trace class level one is the trace norm") {
  OperatorSpace t = traceClass(2);
  NormEstimate e = t.norm(level1(coords2(1, 2, 3, 4)));
  CHECK(e.lower == doctest::Approx(5.830951894845301).epsilon(1e-12));
  CHECK(e.upper == e.lower);
  CHECK(t.norm(level1(coords2(1, 0, 0, -2))).lower == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("trace class level two separates transpose from identity") {
  OperatorSpace t = traceClass(2);
  OptimizerConfig cfg;
  // coordinates [E_ij] pair to the transpose map on M_2, completely bounded norm 2
  NormEstimate tr = t.norm(transposeElement(2), cfg);
  CHECK(tr.lower == doctest::Approx(2.0).epsilon(1e-6));
  // coordinates [E_ji] pair to the identity map, norm 1
  NormEstimate id = t.norm(identityElement(2), cfg);
  CHECK(id.lower == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("trace class satisfies the direct-sum and sandwich axioms") {
  OperatorSpace t = traceClass(2);
  OptimizerConfig cfg;
  cfg.restarts = 8;
  ElementMatrix x = randomElement(4, 2, 201);
  ElementMatrix y = randomElement(4, 1, 202);
  const double nx = t.normValue(x, cfg);
  const double ny = t.normValue(y, cfg);
  const double ns = t.normValue(directSumElement(x, y), cfg);
  CHECK(ns == doctest::Approx(std::max(nx, ny)).epsilon(1e-5));

  CMatrix alpha = unvec(gaussianVector(4, 203), 2, 2);
  CMatrix beta = unvec(gaussianVector(4, 204), 2, 2);
  CHECK(t.normValue(scalarSandwich(alpha, x, beta), cfg) <=
        operatorNorm(alpha) * nx * operatorNorm(beta) + 1e-5);
}

TEST_CASE("column hilbert space") {
  OperatorSpace c = columnHilbert(3);
  CVector v(3);
  v << Complex(1, 1), 2, Complex(0, -2);
  CHECK(c.normValue(level1(v)) == doctest::Approx(v.norm()).epsilon(1e-12));

  // level-2 oracle: operator norm of the stacked (n d) x n matrix
  ElementMatrix x = randomElement(3, 2, 301);
  CMatrix stacked(6, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) stacked.block(i * 3, j, 3, 1) = x.at(i, j);
  CHECK(c.normValue(x) == doctest::Approx(operatorNorm(stacked)).epsilon(1e-12));
}

TEST_CASE("min and max quantizations sandwich the concrete norm") {
  OperatorSpace m = matrixSpace(2);
  OperatorSpace mn = minQuant(m);
  OperatorSpace mx = maxQuant(m);
  OptimizerConfig cfg;

  CVector c = coords2(Complex(1, 0.5), -2, 0.25, Complex(0, 3));
  const double base = m.normValue(level1(c));
  CHECK(mn.normValue(level1(c), cfg) == doctest::Approx(base).epsilon(1e-12));
  CHECK(mx.normValue(level1(c), cfg) == doctest::Approx(base).epsilon(1e-4));

  for (std::uint64_t s = 0; s < 3; ++s) {
    ElementMatrix x = randomElement(4, 2, 400 + s);
    const double cn = m.normValue(x);
    const double lo = mn.normValue(x, cfg);
    const double hi = mx.normValue(x, cfg);
    CHECK(lo <= cn + 1e-9);
    CHECK(hi >= cn - 1e-4);
  }
}

TEST_CASE("direct sums") {
  OperatorSpace m = matrixSpace(2);
  OperatorSpace t = traceClass(2);
  OperatorSpace sInf = directSumInf({m, t});
  OperatorSpace s1 = directSum1({scalarSpace(), scalarSpace()});
  OptimizerConfig cfg;

  CVector c(8);
  c << 1, 2, 3, 4, 1, 0, 0, -2;
  // max(||[[1,2],[3,4]]||, ||diag(1,-2)||_1) = max(5.46..., 3)
  CHECK(sInf.normValue(level1(c), cfg) == doctest::Approx(5.464985704219043).epsilon(1e-10));

  CVector a(2);
  a << Complex(3, 4), Complex(0, -2);
  CHECK(s1.normValue(level1(a), cfg) == doctest::Approx(7.0).epsilon(1e-12));

  // embedding one summand is isometric at level 2
  ElementMatrix x = randomElement(1, 2, 501);
  ElementMatrix emb = ElementMatrix::zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) emb.at(i, j)(0) = x.at(i, j)(0);
  const double direct = operatorNorm([&] {
    CMatrix g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = x.at(i, j)(0);
    return g;
  }());
  CHECK(s1.normValue(emb, cfg) == doctest::Approx(direct).epsilon(1e-5));
}

TEST_CASE("quotient space") {
  OperatorSpace m = matrixSpace(2);
  std::vector<CVector> nullBasis = {coords2(0, 1, 0, 0)};
  OperatorSpace q = quotientSpace(m, nullBasis);
  REQUIRE(q.dim() == 3);

  // class of [[1,2],[3,4]]: inf over t of ||[[1,t],[3,4]]|| = 5 at t = -3/4
  CVector parent = coords2(1, 2, 3, 4);
  CVector qc = quotientRepresentative(q).adjoint() * parent;
  NormEstimate e = q.norm(level1(qc));
  CHECK(e.upper == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(e.lower <= e.upper + 1e-9);
  CHECK(e.lower == doctest::Approx(5.0).epsilon(1e-4));

  // quotient by everything collapses to the zero space
  OperatorSpace z = quotientSpace(
      m, {coords2(1, 0, 0, 0), coords2(0, 1, 0, 0), coords2(0, 0, 1, 0), coords2(0, 0, 0, 1)});
  CHECK(z.kind() == SpaceKind::Zero);
}

TEST_CASE("subspace inherits the parent norm") {
  OperatorSpace m = matrixSpace(2);
  CMatrix inj(4, 2);
  inj.setZero();
  inj(0, 0) = 1;  // E00
  inj(3, 1) = 1;  // E11
  OperatorSpace s = subspaceOf(m, inj);
  CVector c(2);
  c << 3, Complex(0, -4);
  CHECK(s.normValue(level1(c)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(s.exactNorms());
}

TEST_CASE("duality round trips") {
  OperatorSpace m = matrixSpace(2);
  OperatorSpace d = dualSpace(m);
  CHECK(d.kind() == SpaceKind::Dual);
  CHECK(dualSpace(d).sameAs(m));
  // dual of the matrix space is the trace class
  CHECK(d.normValue(level1(coords2(1, 2, 3, 4))) ==
        doctest::Approx(5.830951894845301).epsilon(1e-12));

  OperatorSpace sInf = directSumInf({matrixSpace(2), scalarSpace()});
  CHECK(dualSpace(sInf).kind() == SpaceKind::Sum1);
}

TEST_CASE("space json round trip") {
  OperatorSpace q = quotientSpace(matrixSpace(2), {coords2(0, 1, 0, 0)});
  for (const OperatorSpace& s :
       {matrixSpace(2), traceClass(2), columnHilbert(2), directSumInf({matrixSpace(2), traceClass(2)}),
        directSum1({scalarSpace(), scalarSpace()}), minQuant(matrixSpace(2)), q}) {
    OperatorSpace r = spaceFromJson(s.describe());
    CHECK(r.dim() == s.dim());
    ElementMatrix x = randomElement(s.dim(), 1, 601);
    OptimizerConfig cfg;
    cfg.restarts = 6;
    CHECK(r.normValue(x, cfg) == doctest::Approx(s.normValue(x, cfg)).epsilon(1e-6));
  }
}

TEST_CASE("element json round trip") {
  ElementMatrix x = randomElement(3, 2, 701);
  ElementMatrix y = elementFromJson(elementToJson(x));
  CHECK(y.level == x.level);
  for (std::size_t e = 0; e < x.coords.size(); ++e) CHECK((x.coords[e] - y.coords[e]).norm() == 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(matrixSpace(-1), std::invalid_argument);
  CHECK_THROWS_AS(concreteSpace(2, {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)}),
                  std::invalid_argument);
  OperatorSpace m = matrixSpace(2);
  CHECK_THROWS_AS(m.norm(level1(CVector::Zero(3))), std::invalid_argument);
  CHECK_THROWS_AS(quotientSpace(traceClass(2), {}), std::invalid_argument);
}

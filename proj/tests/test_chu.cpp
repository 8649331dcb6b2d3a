#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oscat/chu.hpp"

using namespace oscat;

namespace {

CVector coordsOf(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

}  // namespace

TEST_CASE("hs object pairing") {
  ChuObject hs = hsObject(2);
  CMatrix e00 = CMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  CHECK(chuPairingValue(hs, coordsOf(e00), coordsOf(z)).real() ==
        doctest::Approx(1.0).epsilon(1e-12));

  ChuObject hs1 = hsObject(1);
  CHECK(chuPairingValue(hs1, CVector::Ones(1), CVector::Ones(1)) == Complex(1.0));

  OptimizerConfig cfg;
  nlohmann::json check = chuCheck(hs, cfg, 1);
  CHECK(check.at("holds").get<bool>());
  CHECK(check.at("jcbLower").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("dual is a strict involution") {
  ChuObject hs = hsObject(2);
  ChuObject d = dualObject(hs);
  CHECK(d.left.sameAs(hs.right));
  CHECK(d.hsFlipped);
  ChuObject dd = dualObject(d);
  CHECK(dd.left.sameAs(hs.left));
  CHECK(dd.right.sameAs(hs.right));
  CHECK_FALSE(dd.hsFlipped);
  CHECK((dd.pairing.coeffs - hs.pairing.coeffs).norm() == 0.0);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const CVector x = gaussianVector(4, splitmix64(10 + s));
    const CVector y = gaussianVector(4, splitmix64(20 + s));
    CHECK(std::abs(chuPairingValue(hs, x, y) - chuPairingValue(d, y, x)) <= 1e-12);
    CHECK(std::abs(chuPairingValue(hs, x, y) - chuPairingValue(dd, x, y)) <= 1e-12);
  }
}

TEST_CASE("channel morphisms validate and perturbations fail") {
  OptimizerConfig cfg;
  ChuObject a = hsObject(2), b = hsObject(2);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Channel ch = randomCptpChannel(2, 2, s);
    ChuMorphism m = channelMorphism(ch);
    VerdictReport r = morphismValid(m, a, b, cfg, 1);
    CHECK(r.verdict != Verdict::Fails);

    ChuMorphism bad = m;
    bad.backward.coeffs(0, 0) += 1e-3;
    VerdictReport rb = morphismValid(bad, a, b, cfg, 1);
    CHECK(rb.verdict == Verdict::Fails);
    CHECK(rb.witness.contains("leftBasisIndex"));
  }

  ChuMorphism id{identityMap(a.left), identityMap(a.right)};
  CHECK(morphismValid(id, a, a, cfg, 1).verdict != Verdict::Fails);

  // distinct channels give distinct morphisms
  ChuMorphism m1 = channelMorphism(randomCptpChannel(2, 2, 7));
  ChuMorphism m2 = channelMorphism(randomCptpChannel(2, 2, 8));
  CHECK((m1.forward.coeffs - m2.forward.coeffs).norm() > 1e-6);
}

TEST_CASE("spatial tensor of hs objects") {
  ChuObject a = hsObject(2), b = hsObject(2);
  ChuObject prod = tensorHS(a, b);
  CHECK(prod.hsDim == 4);
  nlohmann::json rep = tensorHSReport(a, b);
  CHECK(rep.at("holds").get<bool>());
  CHECK(rep.at("pairingMaxDeviation").get<double>() <= 1e-10);

  // unit and associativity via the canonical reindexing
  ChuObject unit = tensorHS(hsObject(1), b);
  CHECK(unit.hsDim == 2);
  CHECK((unit.pairing.coeffs - b.pairing.coeffs).norm() == 0.0);
  ChuObject l = tensorHS(tensorHS(a, b), hsObject(2));
  ChuObject r = tensorHS(a, tensorHS(b, hsObject(2)));
  CHECK(l.hsDim == 8);
  CHECK((l.pairing.coeffs - r.pairing.coeffs).norm() == 0.0);

  ChuObject sum = additiveSum(a, b, SumKind::Plus);
  CHECK_THROWS_WITH_AS(tensorHS(sum, b), "spatial tensor only realized for HS objects",
                       std::invalid_argument);
  CHECK_THROWS_AS(tensorHS(dualObject(a), b), std::invalid_argument);
}

TEST_CASE("additive sums") {
  ChuObject bit = additiveSum(hsObject(1), hsObject(1), SumKind::Plus);
  CHECK(bit.left.kind() == SpaceKind::Sum1);
  CHECK(bit.right.kind() == SpaceKind::SumInf);
  CHECK(bit.left.dim() == 2);

  // pairing is the sum of the component traces, bounded by the l1 x linf norms
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CVector x = gaussianVector(2, splitmix64(100 + s));
    const CVector y = gaussianVector(2, splitmix64(200 + s));
    const Complex val = chuPairingValue(bit, x, y);
    CHECK(std::abs(val - (x(0) * y(0) + x(1) * y(1))) <= 1e-12);
    ElementMatrix ex = ElementMatrix::zero(1, 2), ey = ElementMatrix::zero(1, 2);
    ex.coords[0] = x;
    ey.coords[0] = y;
    CHECK(std::abs(val) <= bit.left.normValue(ex) * bit.right.normValue(ey) + 1e-9);
  }

  // with is the dual arrangement
  ChuObject a = hsObject(2), b = hsObject(2);
  ChuObject w = additiveSum(a, b, SumKind::With);
  ChuObject viaDual = dualObject(additiveSum(dualObject(a), dualObject(b), SumKind::Plus));
  CHECK(w.left.kind() == SpaceKind::SumInf);
  CHECK(w.right.kind() == SpaceKind::Sum1);
  CHECK((w.pairing.coeffs - viaDual.pairing.coeffs).norm() == 0.0);
}

TEST_CASE("polarity interpreter") {
  nlohmann::json p = polarityReport("P:2");
  CHECK(p.at("polarity") == "positive");
  CHECK(p.at("tableRow") == "T(H_P)");
  CHECK(polarityReport("N:2").at("tableRow") == "B(H_N)");
  CHECK(polarityReport("P:2 * R:2").at("tableRow") == "T(H_P (x) H_R)");
  CHECK(polarityReport("P:2 + R:2").at("tableRow") == "T(H_P) (+)1 T(H_R)");
  CHECK(polarityReport("N:2 % M:2").at("tableRow") == "B(H_N (x) H_M)");
  CHECK(polarityReport("N:2 & M:2").at("tableRow") == "B(H_N) (+)inf B(H_M)");

  ChuObject mixed = interpretFormula("(P:2 * R:2) + N:3~");
  CHECK(mixed.left.dim() == 25);
  CHECK(interpretFormula("P:2~").hsFlipped);

  CHECK_THROWS_WITH_AS(interpretFormula("P:2 * N:2"),
                       "ill-polarized formula: '*' requires positive operands",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(interpretFormula("P:2 & P:2"),
                       "ill-polarized formula: '&' requires negative operands",
                       std::invalid_argument);
  CHECK_THROWS_AS(interpretFormula("P:2 *"), std::invalid_argument);
  CHECK_THROWS_AS(interpretFormula("(P:2"), std::invalid_argument);
  CHECK_THROWS_AS(interpretFormula("Q2"), std::invalid_argument);
}

TEST_CASE("chu json round trip") {
  ChuObject hs = hsObject(2);
  ChuObject r = chuFromJson(chuToJson(hs));
  CHECK(r.hsDim == 2);
  CHECK((r.pairing.coeffs - hs.pairing.coeffs).norm() == 0.0);
  CHECK(r.left.dim() == 4);
}

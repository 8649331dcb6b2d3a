#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oscat/qswitch.hpp"

using namespace oscat;

namespace {

CVector coordsOf(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

CMatrix assembleImage(const SwitchInstance& s, const CMatrix& f, const CMatrix& g) {
  ElementMatrix img = ElementMatrix::zero(1, s.map.target.dim());
  img.coords[0] = applyBilinear(s.map, coordsOf(f), coordsOf(g));
  return s.map.target.assemble(img);
}

}  // namespace

TEST_CASE("switch definition on generators") {
  SwitchInstance s = buildSwitch(2);
  const CMatrix id = CMatrix::Identity(2, 2);
  CHECK((assembleImage(s, id, id) - CMatrix::Identity(4, 4)).norm() <= 1e-12);

  const CMatrix f = (CMatrix(2, 2) << 1, 2, Complex(0, 1), -1).finished();
  CHECK((assembleImage(s, f, id) - kron(CMatrix::Identity(2, 2), f)).norm() <= 1e-12);

  CMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  const CMatrix img = assembleImage(s, x, z);
  CHECK((img.topLeftCorner(2, 2) - x * z).norm() <= 1e-12);
  CHECK((img.bottomRightCorner(2, 2) + x * z).norm() <= 1e-12);
  CHECK(operatorNorm(img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("argument swap is conjugation by the control flip") {
  SwitchInstance s = buildSwitch(2);
  CMatrix flip = CMatrix::Zero(4, 4);
  flip.topRightCorner(2, 2) = CMatrix::Identity(2, 2);
  flip.bottomLeftCorner(2, 2) = CMatrix::Identity(2, 2);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const CMatrix f = unvec(gaussianVector(4, splitmix64(seed)), 2, 2);
    const CMatrix g = unvec(gaussianVector(4, splitmix64(seed + 100)), 2, 2);
    CHECK((assembleImage(s, f, g) - flip * assembleImage(s, g, f) * flip).norm() <= 1e-12);
  }
}

TEST_CASE("bilinearity") {
  SwitchInstance s = buildSwitch(2);
  const CVector f1 = gaussianVector(4, 11), f2 = gaussianVector(4, 12), g = gaussianVector(4, 13);
  const Complex a(0.5, -2.0);
  const CVector lhs = applyBilinear(s.map, f1 + a * f2, g);
  const CVector rhs = applyBilinear(s.map, f1, g) + a * applyBilinear(s.map, f2, g);
  CHECK((lhs - rhs).norm() <= 1e-12);
}

TEST_CASE("exact mb witness values") {
  SwitchInstance s2 = buildSwitch(2);
  nlohmann::json w1 = switchMbWitness(s2, 1);
  CHECK(w1.at("mbLower").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  nlohmann::json w2 = switchMbWitness(s2, 2);
  CHECK(w2.at("mbLower").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(w2.at("verdict").get<std::string>() == "obstructed");
  CHECK(w2.at("witnessFNorm").get<double>() <= 1.0 + 1e-12);
  CHECK(w2.at("witnessKNorm").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w2.at("mbLower").get<double>() >= w1.at("mbLower").get<double>() - 1e-12);

  SwitchInstance s3 = buildSwitch(3);
  CHECK(switchMbWitness(s3, 3).at("mbLower").get<double>() == doctest::Approx(3.0).epsilon(1e-9));

  CHECK_THROWS_AS(switchMbWitness(s2, 3), std::invalid_argument);
}

TEST_CASE("jcb certificate") {
  OptimizerConfig cfg;
  SwitchInstance s1 = buildSwitch(1);
  nlohmann::json r1 = switchJcbCertificate(s1, 2, cfg);
  CHECK(r1.at("consistent").get<bool>());
  CHECK(r1.at("jcbLower").get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  SwitchInstance s2 = buildSwitch(2);
  nlohmann::json r2 = switchJcbCertificate(s2, 1, cfg);
  CHECK(r2.at("consistent").get<bool>());
  CHECK(r2.at("jcbLower").get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  SwitchInstance scaled = s2;
  scaled.map.coeffs *= 2.0;
  nlohmann::json rs = switchJcbCertificate(scaled, 1, cfg);
  CHECK(rs.at("violation").get<bool>());
}

TEST_CASE("factorization verdicts") {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  nlohmann::json r1 = noHaagerupFactorization(buildSwitch(1), cfg);
  CHECK(r1.at("verdict").get<std::string>() == "factorized");

  nlohmann::json r2 = noHaagerupFactorization(buildSwitch(2), cfg);
  CHECK(r2.at("verdict").get<std::string>() == "obstructed");
  CHECK(r2.at("mbLower").get<double>() >= 2.0 - 1e-9);
}

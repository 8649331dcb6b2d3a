#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oscat/matrix.hpp"
#include "oscat/optimizer.hpp"

using namespace oscat;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("operator norm on small matrices") {
  CHECK(operatorNorm(m2(0, 1, 0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(operatorNorm(CMatrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(operatorNorm(m2(3, 0, 0, -4)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(operatorNorm(m2(1, 2, 3, 4)) == doctest::Approx(5.464985704219043).epsilon(1e-12));
  CHECK(operatorNorm(CMatrix(0, 0)) == 0.0);
}

TEST_CASE("trace norm") {
  CHECK(traceNorm(m2(1, 0, 0, -2)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(traceNorm(m2(1, 2, 3, 4)) == doctest::Approx(5.830951894845301).epsilon(1e-12));
}

TEST_CASE("kron block convention") {
  CMatrix e01 = m2(0, 1, 0, 0), e10 = m2(0, 0, 1, 0);
  CMatrix k = kron(e01, e10);
  REQUIRE(k.rows() == 4);
  CHECK(std::abs(k(1, 2) - Complex(1.0)) < 1e-15);
  CHECK(k.cwiseAbs().sum() == doctest::Approx(1.0));

  CMatrix a = unvec(gaussianVector(4, 11), 2, 2);
  CMatrix b = unvec(gaussianVector(9, 12), 3, 3);
  CMatrix c = unvec(gaussianVector(4, 13), 2, 2);
  CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).norm() < 1e-12);
}

TEST_CASE("vec is column stacking") {
  CMatrix a = unvec(gaussianVector(4, 21), 2, 2);
  CMatrix x = unvec(gaussianVector(4, 22), 2, 2);
  CMatrix b = unvec(gaussianVector(4, 23), 2, 2);
  CVector lhs = vec(CMatrix(a * x * b));
  CVector rhs = kron(b.transpose(), a) * vec(x);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("min eigenvalue and hermiticity guard") {
  CMatrix swap = CMatrix::Zero(4, 4);
  swap(0, 0) = 1;
  swap(1, 2) = 1;
  swap(2, 1) = 1;
  swap(3, 3) = 1;
  CHECK(minEigenvalue(swap) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(minEigenvalue(m2(0, 1, 0, 0)), "not Hermitian", std::invalid_argument);
}

TEST_CASE("polar factor") {
  CMatrix a = unvec(gaussianVector(9, 31), 3, 3);
  CMatrix p = polarFactor(a);
  CHECK((p.adjoint() * p - CMatrix::Identity(3, 3)).norm() < 1e-12);
  // tr(a† p) attains the trace norm of a
  CHECK(std::abs((a.adjoint() * p).trace().real() - traceNorm(a)) < 1e-10);
}

TEST_CASE("matrix json round trip") {
  CMatrix a = unvec(gaussianVector(6, 41), 2, 3);
  CMatrix b = matrixFromJson(matrixToJson(a));
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("ascent over the euclidean ball") {
  ObjectiveSpec f;
  f.dim = 5;
  f.eval = [](const CVector& x) { return x.norm(); };
  f.linearization = [](const CVector& x) {
    const double n = x.norm();
    return n > 1e-300 ? CVector(x.conjugate() / n) : CVector(CVector::Zero(x.size()));
  };
  BallSpec ball;
  ball.norm = [](const CVector& x) { return x.norm(); };
  ball.linMax = [](const CVector& w) {
    const double n = w.norm();
    return n > 1e-300 ? CVector(w.conjugate() / n) : CVector(CVector::Zero(w.size()));
  };
  OptimizerConfig cfg;
  NormEstimate e = maximizeOverUnitBall(f, ball, cfg);
  CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.converged);
}

TEST_CASE("trace functional over the operator-norm ball") {
  ObjectiveSpec f;
  f.dim = 4;
  f.eval = [](const CVector& x) { return std::abs(unvec(x, 2, 2).trace()); };
  f.linearization = [](const CVector& x) {
    Complex t = unvec(x, 2, 2).trace();
    const double a = std::abs(t);
    const Complex phase = a > 1e-300 ? std::conj(t) / a : Complex(1.0, 0.0);
    return CVector(phase * vec(CMatrix(CMatrix::Identity(2, 2))));
  };
  BallSpec ball;
  ball.norm = [](const CVector& x) { return operatorNorm(unvec(x, 2, 2)); };
  ball.linMax = [](const CVector& w) {
    return vec(polarFactor(unvec(CVector(w.conjugate()), 2, 2)));
  };
  OptimizerConfig cfg;
  NormEstimate e = maximizeOverUnitBall(f, ball, cfg);
  CHECK(e.lower == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("constant objective converges to zero") {
  ObjectiveSpec f;
  f.dim = 3;
  f.eval = [](const CVector&) { return 0.0; };
  BallSpec ball;
  ball.norm = [](const CVector& x) { return x.norm(); };
  OptimizerConfig cfg;
  cfg.restarts = 2;
  NormEstimate e = maximizeOverUnitBall(f, ball, cfg);
  CHECK(e.lower == 0.0);
  CHECK(e.converged);
}

TEST_CASE("restart streams are deterministic and monotone") {
  // Bumpy non-concave objective exercised without a first-order model.
  ObjectiveSpec f;
  f.dim = 4;
  f.eval = [](const CVector& x) {
    return std::abs(x(0)) + 0.5 * std::cos(3.0 * x(1).real()) + 0.1 * std::abs(x(2) * x(3));
  };
  BallSpec ball;
  ball.norm = [](const CVector& x) { return x.norm(); };

  OptimizerConfig a;
  a.restarts = 3;
  OptimizerConfig b;
  b.restarts = 9;
  NormEstimate e1 = maximizeOverUnitBall(f, ball, a);
  NormEstimate e1again = maximizeOverUnitBall(f, ball, a);
  NormEstimate e2 = maximizeOverUnitBall(f, ball, b);
  CHECK(e1.witness.dump() == e1again.witness.dump());
  CHECK(e1.lower == e1again.lower);
  CHECK(e2.lower >= e1.lower);
}

TEST_CASE("diverging objective is reported") {
  ObjectiveSpec f;
  f.dim = 2;
  f.eval = [](const CVector&) { return std::numeric_limits<double>::quiet_NaN(); };
  BallSpec ball;
  ball.norm = [](const CVector& x) { return x.norm(); };
  OptimizerConfig cfg;
  cfg.restarts = 1;
  CHECK_THROWS_WITH_AS(maximizeOverUnitBall(f, ball, cfg), "objective diverged",
                       std::runtime_error);
}

TEST_CASE("convex minimization recovers the projection value") {
  // min over t of || [[1, t], [3, 4]] || = 5 at t = -3/4.
  ObjectiveSpec f;
  f.dim = 1;
  f.eval = [](const CVector& y) { return operatorNorm(m2(1, y(0), 3, 4)); };
  f.linearization = [](const CVector& y) {
    const SingularPair sp = topSingularPair(m2(1, y(0), 3, 4));
    CVector w(1);
    w(0) = std::conj(sp.left(0)) * sp.right(1);
    return w;
  };
  ConvexMinResult r = minimizeConvex(f, CVector::Zero(1));
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-7));
}

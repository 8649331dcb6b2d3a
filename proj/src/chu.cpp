#include "oscat/chu.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oscat {

ChuObject makeChuObject(OperatorSpace left, OperatorSpace right, BilinearMap pairing) {
  if (pairing.target.dim() != 1)
    throw std::invalid_argument("makeChuObject: pairing must be scalar valued");
  if (pairing.left.dim() != left.dim() || pairing.right.dim() != right.dim())
    throw std::invalid_argument("makeChuObject: pairing shape mismatch");
  return {std::move(left), std::move(right), std::move(pairing), 0, false};
}

ChuObject hsObject(int d) {
  if (d < 1) throw std::invalid_argument("hsObject: dimension must be >= 1");
  OperatorSpace t = traceClass(d);
  OperatorSpace m = matrixSpace(d);
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  CMatrix coeffs = CMatrix::Zero(1, dd * dd);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          if (b == c && e == a)
            coeffs(0, (static_cast<Eigen::Index>(a) * d + b) * dd + static_cast<Eigen::Index>(c) * d + e) = 1.0;
  ChuObject obj{t, m, makeBilinearMap(t, m, scalarSpace(), std::move(coeffs)), d, false};
  return obj;
}

ChuObject dualObject(const ChuObject& a) {
  const Eigen::Index dl = a.left.dim(), dr = a.right.dim();
  CMatrix coeffs(1, dl * dr);
  for (Eigen::Index l = 0; l < dl; ++l)
    for (Eigen::Index r = 0; r < dr; ++r) coeffs(0, r * dl + l) = a.pairing.coeffs(0, l * dr + r);
  ChuObject out{a.right, a.left, makeBilinearMap(a.right, a.left, a.pairing.target, std::move(coeffs)),
                a.hsDim, a.hsDim > 0 ? !a.hsFlipped : false};
  return out;
}

Complex chuPairingValue(const ChuObject& a, const CVector& x, const CVector& y) {
  return applyBilinear(a.pairing, x, y)(0);
}

nlohmann::json chuCheck(const ChuObject& a, const OptimizerConfig& cfg, int maxLevel) {
  NormEstimate e = jcbNorm(a.pairing, maxLevel, cfg);
  return {{"jcbLower", e.lower},
          {"maxLevel", maxLevel},
          {"holds", e.lower <= 1.0 + 1e-6},
          {"witness", e.witness}};
}

VerdictReport morphismValid(const ChuMorphism& m, const ChuObject& a, const ChuObject& b,
                            const OptimizerConfig& cfg, int maxLevel) {
  if (m.forward.domain.dim() != a.left.dim() || m.forward.codomain.dim() != b.left.dim() ||
      m.backward.domain.dim() != b.right.dim() || m.backward.codomain.dim() != a.right.dim())
    throw std::invalid_argument("morphismValid: dimension mismatch");

  VerdictReport r;
  double dev = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < a.left.dim(); ++i)
    for (Eigen::Index j = 0; j < b.right.dim(); ++j) {
      CVector ei = CVector::Zero(a.left.dim());
      ei(i) = 1.0;
      CVector ej = CVector::Zero(b.right.dim());
      ej(j) = 1.0;
      const Complex lhs = chuPairingValue(b, m.forward.coeffs.col(i), ej);
      const Complex rhs = chuPairingValue(a, ei, m.backward.coeffs.col(j));
      const double d = std::abs(lhs - rhs);
      if (d > dev) {
        dev = d;
        wi = i;
        wj = j;
      }
    }
  if (dev > 1e-10) {
    r.verdict = Verdict::Fails;
    r.witness = {{"leftBasisIndex", wi}, {"rightBasisIndex", wj}, {"deviation", dev}};
    r.reason = "adjointness fails on a basis pair";
    return r;
  }

  const VerdictReport fwd = isCompleteContraction(m.forward, maxLevel, cfg);
  const VerdictReport bwd = isCompleteContraction(m.backward, maxLevel, cfg);
  r.witness = {{"adjointnessDeviation", dev},
               {"forward", verdictToJson(fwd)},
               {"backward", verdictToJson(bwd)}};
  if (fwd.verdict == Verdict::Fails || bwd.verdict == Verdict::Fails) {
    r.verdict = Verdict::Fails;
    r.reason = "a component is not a complete contraction";
  } else if (fwd.verdict == Verdict::Holds && bwd.verdict == Verdict::Holds) {
    r.verdict = Verdict::Holds;
    r.reason = "adjoint pair of certified complete contractions";
  } else {
    r.verdict = Verdict::Inconclusive;
    r.reason = "adjointness holds; contraction bounds stay within 1 + tolerance";
  }
  return r;
}

ChuMorphism channelMorphism(const Channel& ch) {
  const Channel s = ch.picture == Picture::Schrodinger ? ch : transposeChannel(ch);
  return {channelAsCBMap(s), channelAsCBMap(transposeChannel(s))};
}

namespace {

bool isPlainHS(const ChuObject& a) { return a.hsDim > 0 && !a.hsFlipped; }

}  // namespace

ChuObject tensorHS(const ChuObject& a, const ChuObject& b) {
  if (!isPlainHS(a) || !isPlainHS(b))
    throw std::invalid_argument("spatial tensor only realized for HS objects");
  return hsObject(static_cast<int>(a.hsDim * b.hsDim));
}

nlohmann::json tensorHSReport(const ChuObject& a, const ChuObject& b, const OptimizerConfig& cfg) {
  (void)cfg;
  const ChuObject prod = tensorHS(a, b);
  const int d1 = static_cast<int>(a.hsDim), d2 = static_cast<int>(b.hsDim);
  const Eigen::Index dd = static_cast<Eigen::Index>(d1) * d1 * d2 * d2;

  // coordinate identification (i1 i2) block indices on both sides
  const auto combine = [d1, d2](Eigen::Index i1, Eigen::Index j1, Eigen::Index i2, Eigen::Index j2) {
    const Eigen::Index k = static_cast<Eigen::Index>(d1) * d2;
    return (i1 * d2 + i2) * k + (j1 * d2 + j2);
  };

  double dev = 0.0;
  for (Eigen::Index l1 = 0; l1 < a.left.dim(); ++l1)
    for (Eigen::Index r1 = 0; r1 < a.right.dim(); ++r1)
      for (Eigen::Index l2 = 0; l2 < b.left.dim(); ++l2)
        for (Eigen::Index r2 = 0; r2 < b.right.dim(); ++r2) {
          CVector x = CVector::Zero(dd), y = CVector::Zero(dd);
          x(combine(l1 / d1, l1 % d1, l2 / d2, l2 % d2)) = 1.0;
          y(combine(r1 / d1, r1 % d1, r2 / d2, r2 % d2)) = 1.0;
          CVector e1l = CVector::Zero(a.left.dim()), e1r = CVector::Zero(a.right.dim());
          CVector e2l = CVector::Zero(b.left.dim()), e2r = CVector::Zero(b.right.dim());
          e1l(l1) = 1.0;
          e1r(r1) = 1.0;
          e2l(l2) = 1.0;
          e2r(r2) = 1.0;
          const Complex lhs = chuPairingValue(prod, x, y);
          const Complex rhs = chuPairingValue(a, e1l, e1r) * chuPairingValue(b, e2l, e2r);
          dev = std::max(dev, std::abs(lhs - rhs));
        }

  // side identifications are isometric on elementary samples
  double tDev = 0.0, bDev = 0.0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const CMatrix x1 = unvec(gaussianVector(static_cast<Eigen::Index>(d1) * d1, splitmix64(s)), d1, d1);
    const CMatrix x2 = unvec(gaussianVector(static_cast<Eigen::Index>(d2) * d2, splitmix64(s + 50)), d2, d2);
    tDev = std::max(tDev, std::abs(traceNorm(kron(x1, x2)) - traceNorm(x1) * traceNorm(x2)));
    bDev = std::max(bDev, std::abs(operatorNorm(kron(x1, x2)) - operatorNorm(x1) * operatorNorm(x2)));
  }

  return {{"dim", d1 * d2},
          {"pairingMaxDeviation", dev},
          {"pairingHolds", dev <= 1e-10},
          {"traceSideDeviation", tDev},
          {"matrixSideDeviation", bDev},
          {"holds", dev <= 1e-10 && tDev <= 1e-9 && bDev <= 1e-9}};
}

ChuObject additiveSum(const ChuObject& a, const ChuObject& b, SumKind kind) {
  OperatorSpace left = kind == SumKind::Plus ? directSum1({a.left, b.left})
                                             : directSumInf({a.left, b.left});
  OperatorSpace right = kind == SumKind::Plus ? directSumInf({a.right, b.right})
                                              : directSum1({a.right, b.right});
  const Eigen::Index dla = a.left.dim(), dlb = b.left.dim();
  const Eigen::Index dra = a.right.dim(), drb = b.right.dim();
  const Eigen::Index dl = dla + dlb, dr = dra + drb;
  CMatrix coeffs = CMatrix::Zero(1, dl * dr);
  for (Eigen::Index l = 0; l < dla; ++l)
    for (Eigen::Index r = 0; r < dra; ++r)
      coeffs(0, l * dr + r) = a.pairing.coeffs(0, l * dra + r);
  for (Eigen::Index l = 0; l < dlb; ++l)
    for (Eigen::Index r = 0; r < drb; ++r)
      coeffs(0, (dla + l) * dr + (dra + r)) = b.pairing.coeffs(0, l * drb + r);
  return {left, right, makeBilinearMap(left, right, a.pairing.target, std::move(coeffs)), 0, false};
}

namespace {

struct Interp {
  ChuObject obj;
  bool positive = true;
  std::string row;      // realized table row
  std::string hilbert;  // H-expression when atomic/tensorial
};

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& s) : s_(s) {}

  Interp parse() {
    Interp r = parseExpr();
    skipSpace();
    if (pos_ != s_.size())
      throw std::invalid_argument("formula parse error at position " + std::to_string(pos_));
    return r;
  }

 private:
  Interp parseExpr() {
    Interp acc = parseTerm();
    for (;;) {
      skipSpace();
      if (pos_ >= s_.size()) break;
      const char op = s_[pos_];
      if (op != '*' && op != '%' && op != '+' && op != '&') break;
      ++pos_;
      Interp rhs = parseTerm();
      acc = apply(op, acc, rhs);
    }
    return acc;
  }

  Interp parseTerm() {
    skipSpace();
    if (pos_ >= s_.size()) throw std::invalid_argument("formula parse error: unexpected end");
    Interp base;
    if (s_[pos_] == '(') {
      ++pos_;
      base = parseExpr();
      skipSpace();
      if (pos_ >= s_.size() || s_[pos_] != ')')
        throw std::invalid_argument("formula parse error: missing ')' at position " +
                                    std::to_string(pos_));
      ++pos_;
    } else {
      base = parseAtom();
    }
    for (;;) {
      skipSpace();
      if (pos_ < s_.size() && s_[pos_] == '~') {
        ++pos_;
        base = dualize(base);
      } else {
        break;
      }
    }
    return base;
  }

  Interp parseAtom() {
    skipSpace();
    std::string name;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      name.push_back(s_[pos_]);
      ++pos_;
    }
    if (name.empty() || pos_ >= s_.size() || s_[pos_] != ':')
      throw std::invalid_argument("formula parse error: expected atom 'NAME:d' at position " +
                                  std::to_string(pos_));
    ++pos_;
    std::string digits;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      digits.push_back(s_[pos_]);
      ++pos_;
    }
    if (digits.empty())
      throw std::invalid_argument("formula parse error: missing dimension at position " +
                                  std::to_string(pos_));
    const int d = std::stoi(digits);
    // names starting with N or M are negatively polarized atoms
    const bool negative = name[0] == 'N' || name[0] == 'M';
    Interp r;
    r.positive = !negative;
    r.obj = negative ? dualObject(hsObject(d)) : hsObject(d);
    r.hilbert = "H_" + name;
    r.row = (negative ? "B(" : "T(") + r.hilbert + ")";
    return r;
  }

  static Interp dualize(const Interp& a) {
    Interp r;
    r.obj = dualObject(a.obj);
    r.positive = !a.positive;
    r.hilbert = a.hilbert;
    if (!a.hilbert.empty())
      r.row = (r.positive ? "T(" : "B(") + a.hilbert + ")";
    else
      r.row = "dual of " + a.row;
    return r;
  }

  static Interp apply(char op, const Interp& a, const Interp& b) {
    Interp r;
    if (op == '*' || op == '+') {
      if (!a.positive || !b.positive)
        throw std::invalid_argument(std::string("ill-polarized formula: '") + op +
                                    "' requires positive operands");
      r.positive = true;
      if (op == '*') {
        r.obj = tensorHS(a.obj, b.obj);
        r.hilbert = a.hilbert + " (x) " + b.hilbert;
        r.row = "T(" + r.hilbert + ")";
      } else {
        r.obj = additiveSum(a.obj, b.obj, SumKind::Plus);
        r.row = a.row + " (+)1 " + b.row;
      }
    } else {
      if (a.positive || b.positive)
        throw std::invalid_argument(std::string("ill-polarized formula: '") + op +
                                    "' requires negative operands");
      r.positive = false;
      if (op == '%') {
        r.obj = dualObject(tensorHS(dualObject(a.obj), dualObject(b.obj)));
        r.hilbert = a.hilbert + " (x) " + b.hilbert;
        r.row = "B(" + r.hilbert + ")";
      } else {
        r.obj = additiveSum(a.obj, b.obj, SumKind::With);
        r.row = a.row + " (+)inf " + b.row;
      }
    }
    return r;
  }

  void skipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ChuObject interpretFormula(const std::string& formula) {
  return FormulaParser(formula).parse().obj;
}

nlohmann::json polarityReport(const std::string& formula) {
  Interp r = FormulaParser(formula).parse();
  return {{"formula", formula},
          {"polarity", r.positive ? "positive" : "negative"},
          {"tableRow", r.row},
          {"leftSpace", r.obj.left.describe()},
          {"rightSpace", r.obj.right.describe()}};
}

nlohmann::json chuToJson(const ChuObject& a) {
  return {{"left", a.left.describe()},
          {"right", a.right.describe()},
          {"coeffs", matrixToJson(a.pairing.coeffs)},
          {"hsDim", a.hsDim},
          {"hsFlipped", a.hsFlipped}};
}

ChuObject chuFromJson(const nlohmann::json& j) {
  OperatorSpace left = spaceFromJson(j.at("left"));
  OperatorSpace right = spaceFromJson(j.at("right"));
  ChuObject obj = makeChuObject(left, right,
                                makeBilinearMap(left, right, scalarSpace(),
                                                matrixFromJson(j.at("coeffs"))));
  obj.hsDim = j.value("hsDim", Eigen::Index(0));
  obj.hsFlipped = j.value("hsFlipped", false);
  return obj;
}

}  // namespace oscat

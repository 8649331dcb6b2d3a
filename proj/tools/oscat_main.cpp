#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oscat/chu.hpp"
#include "oscat/qswitch.hpp"
#include "oscat/report.hpp"

namespace {

using nlohmann::json;
using namespace oscat;

struct Options {
  RunConfig rc;
  std::string inputPath;
  std::string outputPath;
};

void addCommon(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.rc.seed, "optimizer seed");
  cmd->add_option("--max-level", o.rc.maxLevel, "highest amplification level");
  cmd->add_option("--restarts", o.rc.restarts, "optimizer restarts");
  cmd->add_option("--tol-alg", o.rc.tolAlgebraic, "algebraic identity tolerance");
  cmd->add_option("--tol-opt", o.rc.tolOptimized, "optimized bound tolerance");
  cmd->add_option("--input", o.inputPath, "input JSON file");
  cmd->add_option("--output", o.outputPath, "report file (stdout when absent)");
  cmd->add_flag_callback(
      "--no-timestamp", [&o] { o.rc.timestamp = false; }, "omit the timestamp from the report");
}

json loadInput(const Options& o) {
  if (o.inputPath.empty()) throw std::invalid_argument("missing --input FILE");
  std::ifstream f(o.inputPath);
  if (!f) throw std::invalid_argument("cannot open input file: " + o.inputPath);
  return json::parse(f);  // parse errors carry the byte position
}

int finish(const Options& o, const std::string& command, const json& input, const json& body,
           const std::vector<std::string>& refs, Verdict v) {
  const std::string text = renderReport(makeReport(command, o.rc, input, body, refs));
  if (!o.outputPath.empty()) {
    std::ofstream f(o.outputPath);
    if (!f) throw std::invalid_argument("cannot open output file: " + o.outputPath);
    f << text;
  } else {
    std::cout << text;
  }
  return exitCodeFor(v);
}

int runNorm(const Options& o) {
  const json in = loadInput(o);
  const OperatorSpace X = spaceFromJson(in.at("space"));
  const ElementMatrix x = elementFromJson(in.at("element"));
  const NormEstimate est = X.norm(x, optimizerConfigOf(o.rc));
  const json body{{"kind", kindName(X.kind())},
                  {"level", x.level},
                  {"exact", X.exactNorms()},
                  {"estimate", estimateToJson(est)}};
  return finish(o, "norm", in, body, {"Def. III.2: operator-space matrix norms (M1, M2)"},
                Verdict::Holds);
}

int runCbNorm(const Options& o) {
  const json in = loadInput(o);
  const CBMap u = mapFromJson(in.at("map"));
  const NormEstimate est = cbNormLower(u, o.rc.maxLevel, optimizerConfigOf(o.rc));
  const json body{{"value", est.lower},
                  {"upper", boundToJson(est.upper)},
                  {"exact", est.converged},
                  {"maxLevel", o.rc.maxLevel},
                  {"witness", est.witness}};
  return finish(o, "cbnorm", in, body,
                {"Smith cap: a cb norm into M_k is attained at amplification level k"},
                Verdict::Holds);
}

int runTensorNorm(const Options& o, const std::string& kind) {
  const json in = loadInput(o);
  const OperatorSpace X = spaceFromJson(in.at("leftSpace"));
  const OperatorSpace Y = spaceFromJson(in.at("rightSpace"));
  const TensorElement v = tensorFromJson(in.at("element"));
  const OptimizerConfig cfg = optimizerConfigOf(o.rc);
  const NormEstimate est = kind == "proj" ? projectiveNorm(X, Y, v, cfg) : haagerupNorm(X, Y, v, cfg);
  const json body{{"kind", kind}, {"estimate", estimateToJson(est)}};
  const std::vector<std::string> refs =
      kind == "proj"
          ? std::vector<std::string>{"Def. III.13: completely projective tensor norm"}
          : std::vector<std::string>{"§IV-C: Haagerup tensor norm; ‖v‖_h ≤ ‖v‖_∧"};
  return finish(o, "tensor-norm", in, body, refs, Verdict::Holds);
}

int runBilinearNorm(const Options& o, const std::string& which) {
  const json in = loadInput(o);
  const BilinearMap u = bilinearFromJson(in.at("map"));
  const OptimizerConfig cfg = optimizerConfigOf(o.rc);
  const NormEstimate est = which == "jcb" ? jcbNorm(u, o.rc.maxLevel, cfg)
                                          : mbNorm(u, o.rc.maxLevel, cfg);
  const json body{{"lower", est.lower}, {"maxLevel", o.rc.maxLevel}, {"witness", est.witness}};
  return finish(o, which, in, body,
                {"Prop. IV.5: matrix-bounded bilinear maps and Haagerup factorizations"},
                Verdict::Holds);
}

int runChannelCheck(const Options& o) {
  const json in = loadInput(o);
  const Channel ch = channelFromJson(in.at("channel"));
  const VerdictReport cp = isCompletelyPositive(ch);
  const VerdictReport tp = isTracePreserving(ch);
  const VerdictReport un = isUnital(ch);
  const VerdictReport pos = isPositive(ch, o.rc.seed);
  const bool schrod = ch.picture == Picture::Schrodinger;
  const Verdict admissible = combineVerdicts({cp.verdict, schrod ? tp.verdict : un.verdict});
  const json body{{"picture", pictureName(ch.picture)},
                  {"completelyPositive", verdictToJson(cp)},
                  {"tracePreserving", verdictToJson(tp)},
                  {"unital", verdictToJson(un)},
                  {"positive", verdictToJson(pos)},
                  {"choiMinEigenvalue", minEigenvalue(hermitianPart(choiOf(ch)))},
                  {"admissible", verdictName(admissible)}};
  return finish(o, "channel check", in, body,
                {"Props. IV.1–IV.2: CP iff complete contraction for unital/TP maps",
                 "Prop III.1(2): TP iff unital"},
                admissible);
}

int runChannelTranspose(const Options& o) {
  const json in = loadInput(o);
  const Channel ch = channelFromJson(in.at("channel"));
  const Channel tr = transposeChannel(ch);
  const double invDev = (transposeChannel(tr).superop - ch.superop).norm();
  double pairingDev = 0.0;
  for (Eigen::Index a = 0; a < ch.dimIn * ch.dimIn; ++a)
    for (Eigen::Index c = 0; c < ch.dimOut * ch.dimOut; ++c) {
      CMatrix x = unvec(CVector::Unit(ch.dimIn * ch.dimIn, a), ch.dimIn, ch.dimIn);
      CMatrix y = unvec(CVector::Unit(ch.dimOut * ch.dimOut, c), ch.dimOut, ch.dimOut);
      pairingDev = std::max(pairingDev, std::abs(tracePairing(applyChannel(ch, x), y) -
                                                 tracePairing(x, applyChannel(tr, y))));
    }
  const Verdict v = pairingDev <= o.rc.tolAlgebraic && invDev <= o.rc.tolAlgebraic
                        ? Verdict::Holds
                        : Verdict::Fails;
  const json body{{"transposed", channelToJson(tr)},
                  {"pairingMaxDeviation", pairingDev},
                  {"involutionDeviation", invDev},
                  {"verdict", verdictName(v)}};
  return finish(o, "channel transpose", in, body, {"eq. (6): trace-pairing adjunction"}, v);
}

int runChannelHsSuite(const Options& o) {
  const json in = loadInput(o);
  const Channel ch = channelFromJson(in.at("channel"));
  const json suite = hsCorrespondenceSuite(ch, optimizerConfigOf(o.rc));
  const Verdict v = suite.at("holds").get<bool>() ? Verdict::Holds : Verdict::Fails;
  return finish(o, "channel hs-suite", in, suite,
                {"eq. (6): trace-pairing adjunction",
                 "Prop. III.1(1): positivity and complete positivity transfer",
                 "Prop III.1(2): TP iff unital", "Prop. III.1(3): cb norms agree"},
                v);
}

int runSwitchDemo(const Options& o, int dim, int n) {
  const SwitchInstance s = buildSwitch(dim);
  const OptimizerConfig cfg = optimizerConfigOf(o.rc);
  const json witness = switchMbWitness(s, n);
  const json cert = switchJcbCertificate(s, std::min(o.rc.maxLevel, 2), cfg);
  const bool claim = std::abs(witness.at("mbLower").get<double>() - n) <= o.rc.tolAlgebraic &&
                     cert.at("consistent").get<bool>();
  const json body{{"dimH", dim},
                  {"n", n},
                  {"mbWitness", witness},
                  {"jcbCertificate", cert},
                  {"claimVerified", claim}};
  return finish(o, "switch demo", json{{"dim", dim}, {"n", n}}, body,
                {"Appendix B: ‖u‖_mb ≥ n", "Appendix B: ‖qsw‖_cb = 1"},
                claim ? Verdict::Holds : Verdict::Fails);
}

int runChuCheck(const Options& o) {
  const json in = loadInput(o);
  const ChuObject obj = chuFromJson(in.at("object"));
  const json chk = chuCheck(obj, optimizerConfigOf(o.rc), std::min(o.rc.maxLevel, 2));
  const ChuObject dd = dualObject(dualObject(obj));
  const double ddDev = (dd.pairing.coeffs - obj.pairing.coeffs).norm();
  const Verdict v =
      chk.at("holds").get<bool>() && ddDev <= o.rc.tolAlgebraic ? Verdict::Holds : Verdict::Fails;
  const json body{{"check", chk}, {"dualInvolutionDeviation", ddDev}, {"verdict", verdictName(v)}};
  return finish(o, "chu check", in, body, {"§V Definition: Chu objects over the trace pairing"}, v);
}

int runChuInterpret(const Options& o, const std::string& formula) {
  const json pol = polarityReport(formula);
  const ChuObject obj = interpretFormula(formula);
  const json chk = chuCheck(obj, optimizerConfigOf(o.rc), 1);
  const json body{{"formula", formula},
                  {"interpretation", pol},
                  {"object",
                   {{"leftDim", obj.left.dim()},
                    {"rightDim", obj.right.dim()},
                    {"hsDim", obj.hsDim},
                    {"hsFlipped", obj.hsFlipped}}},
                  {"check", chk}};
  const Verdict v = chk.at("holds").get<bool>() ? Verdict::Holds : Verdict::Fails;
  return finish(o, "chu interpret", json{{"formula", formula}}, body,
                {"§V Tables I–II: polarized interpretation", "Prop. V.3: duality of the rows"}, v);
}

int runVerifyAxioms(const Options& o, int samples) {
  const json sweep =
      axiomSweep(samples, o.rc.maxLevel, optimizerConfigOf(o.rc), o.rc.tolOptimized);
  const Verdict v = sweep.at("holds").get<bool>() ? Verdict::Holds : Verdict::Fails;
  return finish(o, "verify-axioms", json{{"samples", samples}}, sweep,
                {"Def. III.2: M1 and M2 axioms"}, v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-space and quantum-channel verification toolkit"};
  app.require_subcommand(1);

  Options o;
  int exitCode = 0;
  std::string tensorKind = "proj";
  int switchDim = 2, switchN = 2, samples = 20;
  std::string formula;

  auto* norm = app.add_subcommand("norm", "norm estimate of an element");
  addCommon(norm, o);
  norm->callback([&] { exitCode = runNorm(o); });

  auto* cbnorm = app.add_subcommand("cbnorm", "cb norm bound of a linear map");
  addCommon(cbnorm, o);
  cbnorm->callback([&] { exitCode = runCbNorm(o); });

  auto* tensor = app.add_subcommand("tensor-norm", "projective or Haagerup tensor norm");
  addCommon(tensor, o);
  tensor->add_option("--kind", tensorKind, "proj or haag")
      ->check(CLI::IsMember({"proj", "haag"}));
  tensor->callback([&] { exitCode = runTensorNorm(o, tensorKind); });

  auto* jcb = app.add_subcommand("jcb", "jointly completely bounded norm of a bilinear map");
  addCommon(jcb, o);
  jcb->callback([&] { exitCode = runBilinearNorm(o, "jcb"); });

  auto* mb = app.add_subcommand("mb", "matrix-bounded norm of a bilinear map");
  addCommon(mb, o);
  mb->callback([&] { exitCode = runBilinearNorm(o, "mb"); });

  auto* channel = app.add_subcommand("channel", "channel predicates and transforms");
  channel->require_subcommand(1);
  auto* chCheck = channel->add_subcommand("check", "CP/TP/unital/positivity verdicts");
  addCommon(chCheck, o);
  chCheck->callback([&] { exitCode = runChannelCheck(o); });
  auto* chTr = channel->add_subcommand("transpose", "trace-pairing adjoint");
  addCommon(chTr, o);
  chTr->callback([&] { exitCode = runChannelTranspose(o); });
  auto* chHs = channel->add_subcommand("hs-suite", "Heisenberg-Schrodinger correspondence suite");
  addCommon(chHs, o);
  chHs->callback([&] { exitCode = runChannelHsSuite(o); });

  auto* sw = app.add_subcommand("switch", "quantum switch analysis");
  sw->require_subcommand(1);
  auto* swDemo = sw->add_subcommand("demo", "mb obstruction witness and jcb certificate");
  addCommon(swDemo, o);
  swDemo->add_option("--dim", switchDim, "dimension of the system space");
  swDemo->add_option("--n", switchN, "witness amplification level");
  swDemo->callback([&] { exitCode = runSwitchDemo(o, switchDim, switchN); });

  auto* chu = app.add_subcommand("chu", "Chu objects and the polarized interpreter");
  chu->require_subcommand(1);
  auto* chuC = chu->add_subcommand("check", "pairing contraction and dual involution");
  addCommon(chuC, o);
  chuC->callback([&] { exitCode = runChuCheck(o); });
  auto* chuI = chu->add_subcommand("interpret", "interpret a polarized formula");
  addCommon(chuI, o);
  chuI->add_option("--formula", formula, "formula, e.g. \"(P:2 * R:2) + N:3~\"")->required();
  chuI->callback([&] { exitCode = runChuInterpret(o, formula); });

  auto* axioms = app.add_subcommand("verify-axioms", "M1/M2 sweep over constructed spaces");
  addCommon(axioms, o);
  axioms->add_option("--samples", samples, "samples per space");
  axioms->callback([&] { exitCode = runVerifyAxioms(o, samples); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  }
  return exitCode;
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oscat/chu.hpp"
#include "oscat/exponential.hpp"
#include "oscat/qswitch.hpp"
#include "oscat/report.hpp"

namespace py = pybind11;
using namespace oscat;
using nlohmann::json;

namespace {

py::object toPy(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json fromPy(const py::object& obj) {
  const std::string s = py::cast<std::string>(py::module_::import("json").attr("dumps")(obj));
  return json::parse(s);
}

py::object estimatePy(const NormEstimate& e) { return toPy(estimateToJson(e)); }

Picture pictureOf(const std::string& name) {
  if (name == "schrodinger") return Picture::Schrodinger;
  if (name == "heisenberg") return Picture::Heisenberg;
  throw std::invalid_argument("picture must be 'schrodinger' or 'heisenberg'");
}

}  // namespace

PYBIND11_MODULE(_oscat, m) {
  m.doc() = "Operator spaces, cb maps, tensor norms, channels, and the Chu model";

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("seed", &OptimizerConfig::seed)
      .def_readwrite("restarts", &OptimizerConfig::restarts)
      .def_readwrite("max_iterations", &OptimizerConfig::maxIterations);

  py::class_<ElementMatrix>(m, "ElementMatrix")
      .def(py::init([](int level, std::vector<CVector> coords) {
             ElementMatrix x;
             x.level = level;
             x.coords = std::move(coords);
             return x;
           }),
           py::arg("level"), py::arg("coords"))
      .def_readonly("level", &ElementMatrix::level)
      .def_readonly("coords", &ElementMatrix::coords)
      .def("dim", &ElementMatrix::dim);
  m.def("random_element", &randomElement, py::arg("dim"), py::arg("level"), py::arg("seed"));

  py::class_<OperatorSpace>(m, "OperatorSpace")
      .def("dim", &OperatorSpace::dim)
      .def("exact_norms", &OperatorSpace::exactNorms)
      .def("kind", [](const OperatorSpace& s) { return kindName(s.kind()); })
      .def("describe", [](const OperatorSpace& s) { return toPy(s.describe()); })
      .def("norm",
           [](const OperatorSpace& s, const ElementMatrix& x, const OptimizerConfig& cfg) {
             return estimatePy(s.norm(x, cfg));
           },
           py::arg("x"), py::arg("config") = OptimizerConfig{})
      .def("norm_value", &OperatorSpace::normValue, py::arg("x"),
           py::arg("config") = OptimizerConfig{});
  m.def("matrix_space", &matrixSpace, py::arg("k"));
  m.def("trace_class", &traceClass, py::arg("k"));
  m.def("column_hilbert", &columnHilbert, py::arg("d"));
  m.def("min_quant", &minQuant);
  m.def("max_quant", &maxQuant);
  m.def("dual_space", &dualSpace);
  m.def("direct_sum1", &directSum1);
  m.def("direct_sum_inf", &directSumInf);
  m.def("quotient_space", &quotientSpace, py::arg("space"), py::arg("null_basis"));
  m.def("space_from_json", [](const py::object& j) { return spaceFromJson(fromPy(j)); });

  py::class_<CBMap>(m, "CBMap")
      .def_readonly("domain", &CBMap::domain)
      .def_readonly("codomain", &CBMap::codomain)
      .def_readonly("coeffs", &CBMap::coeffs);
  m.def("make_cb_map", &makeCBMap, py::arg("domain"), py::arg("codomain"), py::arg("coeffs"));
  m.def("identity_map", &identityMap);
  m.def("transpose_map", &transposeMap, py::arg("k"));
  m.def("cb_norm_lower",
        [](const CBMap& u, int maxLevel, const OptimizerConfig& cfg) {
          return estimatePy(cbNormLower(u, maxLevel, cfg));
        },
        py::arg("u"), py::arg("max_level"), py::arg("config") = OptimizerConfig{});
  m.def("is_complete_contraction",
        [](const CBMap& u, int maxLevel, const OptimizerConfig& cfg) {
          return toPy(verdictToJson(isCompleteContraction(u, maxLevel, cfg)));
        },
        py::arg("u"), py::arg("max_level"), py::arg("config") = OptimizerConfig{});

  py::class_<TensorElement>(m, "TensorElement")
      .def(py::init([](int level, Eigen::Index leftDim, Eigen::Index rightDim,
                       std::vector<CVector> coords) {
             TensorElement v;
             v.level = level;
             v.leftDim = leftDim;
             v.rightDim = rightDim;
             v.coords = std::move(coords);
             return v;
           }),
           py::arg("level"), py::arg("left_dim"), py::arg("right_dim"), py::arg("coords"))
      .def_readonly("level", &TensorElement::level)
      .def_readonly("coords", &TensorElement::coords);
  m.def("tensor_of", &tensorOf, py::arg("x"), py::arg("y"));
  m.def("projective_norm",
        [](const OperatorSpace& X, const OperatorSpace& Y, const TensorElement& v,
           const OptimizerConfig& cfg) { return estimatePy(projectiveNorm(X, Y, v, cfg)); },
        py::arg("left"), py::arg("right"), py::arg("v"), py::arg("config") = OptimizerConfig{});
  m.def("haagerup_norm",
        [](const OperatorSpace& X, const OperatorSpace& Y, const TensorElement& v,
           const OptimizerConfig& cfg) { return estimatePy(haagerupNorm(X, Y, v, cfg)); },
        py::arg("left"), py::arg("right"), py::arg("v"), py::arg("config") = OptimizerConfig{});

  py::class_<BilinearMap>(m, "BilinearMap")
      .def_readonly("coeffs", &BilinearMap::coeffs);
  m.def("multiplication_map", &multiplicationMap, py::arg("k"));
  m.def("make_bilinear_map", &makeBilinearMap, py::arg("left"), py::arg("right"),
        py::arg("target"), py::arg("coeffs"));
  m.def("jcb_norm",
        [](const BilinearMap& u, int maxLevel, const OptimizerConfig& cfg) {
          return estimatePy(jcbNorm(u, maxLevel, cfg));
        },
        py::arg("u"), py::arg("max_level"), py::arg("config") = OptimizerConfig{});
  m.def("mb_norm",
        [](const BilinearMap& u, int maxLevel, const OptimizerConfig& cfg) {
          return estimatePy(mbNorm(u, maxLevel, cfg));
        },
        py::arg("u"), py::arg("max_level"), py::arg("config") = OptimizerConfig{});

  py::class_<Channel>(m, "Channel")
      .def_readonly("dim_in", &Channel::dimIn)
      .def_readonly("dim_out", &Channel::dimOut)
      .def_readonly("superop", &Channel::superop)
      .def_property_readonly("picture",
                             [](const Channel& ch) { return pictureName(ch.picture); });
  m.def("make_channel",
        [](Eigen::Index dimIn, Eigen::Index dimOut, CMatrix superop, const std::string& pic) {
          return makeChannel(dimIn, dimOut, std::move(superop), pictureOf(pic));
        },
        py::arg("dim_in"), py::arg("dim_out"), py::arg("superop"),
        py::arg("picture") = "schrodinger");
  m.def("apply_channel", &applyChannel);
  m.def("choi_of", &choiOf);
  m.def("transpose_channel", &transposeChannel);
  m.def("random_cptp_channel", &randomCptpChannel, py::arg("dim_in"), py::arg("dim_out"),
        py::arg("seed"));
  m.def("is_completely_positive",
        [](const Channel& ch) { return toPy(verdictToJson(isCompletelyPositive(ch))); });
  m.def("is_trace_preserving",
        [](const Channel& ch) { return toPy(verdictToJson(isTracePreserving(ch))); });
  m.def("is_unital", [](const Channel& ch) { return toPy(verdictToJson(isUnital(ch))); });
  m.def("hs_correspondence_suite",
        [](const Channel& ch, const OptimizerConfig& cfg, int cbLevel) {
          return toPy(hsCorrespondenceSuite(ch, cfg, cbLevel));
        },
        py::arg("channel"), py::arg("config") = OptimizerConfig{}, py::arg("cb_level") = 1);
  m.def("cc_iff_cp_suite",
        [](const Channel& ch, const OptimizerConfig& cfg) { return toPy(ccIffCpSuite(ch, cfg)); },
        py::arg("channel"), py::arg("config") = OptimizerConfig{});

  m.def("switch_mb_witness",
        [](int d, int n) { return toPy(switchMbWitness(buildSwitch(d), n)); }, py::arg("dim"),
        py::arg("n"));
  m.def("switch_jcb_certificate",
        [](int d, int maxLevel, const OptimizerConfig& cfg) {
          return toPy(switchJcbCertificate(buildSwitch(d), maxLevel, cfg));
        },
        py::arg("dim"), py::arg("max_level") = 2, py::arg("config") = OptimizerConfig{});
  m.def("no_haagerup_factorization",
        [](int d, const OptimizerConfig& cfg) {
          return toPy(noHaagerupFactorization(buildSwitch(d), cfg));
        },
        py::arg("dim"), py::arg("config") = OptimizerConfig{});

  py::class_<ChuObject>(m, "ChuObject")
      .def_readonly("left", &ChuObject::left)
      .def_readonly("right", &ChuObject::right)
      .def_readonly("hs_dim", &ChuObject::hsDim);
  m.def("hs_object", &hsObject, py::arg("d"));
  m.def("dual_object", &dualObject);
  m.def("tensor_hs", &tensorHS);
  m.def("interpret_formula", &interpretFormula, py::arg("formula"));
  m.def("chu_check",
        [](const ChuObject& a, const OptimizerConfig& cfg, int maxLevel) {
          return toPy(chuCheck(a, cfg, maxLevel));
        },
        py::arg("object"), py::arg("config") = OptimizerConfig{}, py::arg("max_level") = 2);
  m.def("polarity_report",
        [](const std::string& formula) { return toPy(polarityReport(formula)); },
        py::arg("formula"));

  m.def("u_adjoint", &uAdjoint);
  m.def("u_ctrl", &uCtrl);
  m.def("u_apply", &uApply);

  m.def("axiom_sweep",
        [](int samplesPerSpace, int maxLevel, const OptimizerConfig& cfg, double tol) {
          return toPy(axiomSweep(samplesPerSpace, maxLevel, cfg, tol));
        },
        py::arg("samples_per_space") = 10, py::arg("max_level") = 2,
        py::arg("config") = OptimizerConfig{}, py::arg("tol") = 1e-6);
}

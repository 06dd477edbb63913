#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ieti/experiments.hpp"

namespace py = pybind11;
using namespace ieti;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-patch isogeometric IETI-DP solver bindings";

  py::register_exception<ExperimentError>(m, "ExperimentError", PyExc_RuntimeError);
  py::register_exception<InvalidConfig>(m, "InvalidConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("experiment", &ExperimentConfig::experiment)
      .def_readwrite("p", &ExperimentConfig::p)
      .def_readwrite("refine", &ExperimentConfig::refine)
      .def_readwrite("disparity", &ExperimentConfig::disparity)
      .def_readwrite("pattern", &ExperimentConfig::pattern)
      .def_readwrite("precond", &ExperimentConfig::precond)
      .def_readwrite("tol", &ExperimentConfig::tol)
      .def_readwrite("theta", &ExperimentConfig::theta)
      .def_readwrite("consistency", &ExperimentConfig::consistency)
      .def_readwrite("radii", &ExperimentConfig::radii)
      .def_readwrite("out", &ExperimentConfig::out)
      .def_readwrite("dof_ceiling", &ExperimentConfig::dof_ceiling)
      .def("__repr__", [](const ExperimentConfig& c) {
        std::ostringstream os;
        os << "Config(experiment='" << c.experiment << "', p=" << c.p
           << ", refine=" << c.refine << ", disparity=" << c.disparity << ", pattern='"
           << c.pattern << "', precond='" << c.precond << "')";
        return os.str();
      });

  py::class_<ResultRow>(m, "Row")
      .def_readonly("p", &ResultRow::p)
      .def_readonly("level", &ResultRow::level)
      .def_readonly("patches", &ResultRow::patches)
      .def_readonly("dofs", &ResultRow::dofs)
      .def_readonly("iterations", &ResultRow::iterations)
      .def_readonly("kappa", &ResultRow::kappa)
      .def_readonly("skipped", &ResultRow::skipped)
      .def("__repr__", [](const ResultRow& r) {
        std::ostringstream os;
        os << "Row(p=" << r.p << ", level=" << r.level << ", patches=" << r.patches
           << ", dofs=" << r.dofs << ", iterations=" << r.iterations
           << ", kappa=" << format_kappa(r.kappa) << (r.skipped ? ", skipped=True)" : ")");
        return os.str();
      });

  py::class_<AdaptiveRound>(m, "AdaptiveRound")
      .def_readonly("row", &AdaptiveRound::row)
      .def_readonly("eta", &AdaptiveRound::eta)
      .def_readonly("marked", &AdaptiveRound::marked)
      .def_readonly("consistency_extra", &AdaptiveRound::consistency_extra)
      .def("__repr__", [](const AdaptiveRound& r) {
        std::ostringstream os;
        os << "AdaptiveRound(patches=" << r.row.patches << ", eta=" << r.eta
           << ", marked=" << r.marked << ")";
        return os.str();
      });

  m.def("parse_config",
        [](const std::string& text, const ExperimentConfig& base) {
          return parse_config(text, base);
        },
        py::arg("json_text"), py::arg("base") = ExperimentConfig{},
        "Parse a JSON configuration document on top of a base configuration.");
  m.def("validate", &validate, py::arg("config"),
        "Raise InvalidConfigError when a configuration is out of range.");
  m.def("run", &run, py::arg("config"),
        "Run the configured experiment and return the result rows.",
        py::call_guard<py::gil_scoped_release>());
  m.def("run_adaptive_detailed", &run_adaptive_detailed, py::arg("config"),
        "Run the adaptive experiment and return per-round records.",
        py::call_guard<py::gil_scoped_release>());
  m.def("to_csv", &to_csv, py::arg("rows"), "Serialize result rows to CSV.");
  m.def("render_table", &render_table, py::arg("rows"),
        "Render result rows as an aligned text table.");
  m.def("format_kappa", &format_kappa, py::arg("kappa"),
        "Format a condition number the way tables and CSV output do.");
}

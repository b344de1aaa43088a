#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conewave/config.hpp"
#include "conewave/error.hpp"
#include "conewave/report.hpp"

namespace py = pybind11;
using namespace conewave;

namespace {

py::dict report_dict(const TrialReport& r) {
  py::list rows;
  for (const TrialRow& row : r.rows) {
    py::dict d;
    d["trial"] = row.trial;
    d["seed"] = row.seed;
    d["ratio"] = row.ratio;
    d["lhs"] = row.lhs;
    d["rhs"] = row.rhs;
    for (const auto& [k, v] : row.extras) d[py::str(k)] = v;
    rows.append(d);
  }
  py::dict summary;
  for (const auto& [k, v] : r.summary) summary[py::str(k)] = v;
  py::list checks;
  for (const Check& c : r.checks) checks.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.passed,
                                                         py::arg("value") = c.value, py::arg("bound") = c.bound));
  py::dict out;
  out["experiment"] = r.experiment;
  out["rows"] = rows;
  out["max_ratio"] = r.max_ratio;
  out["min_ratio"] = r.min_ratio;
  out["median_ratio"] = r.median_ratio;
  out["summary"] = summary;
  out["checks"] = checks;
  out["passed"] = r.passed();
  out["csv"] = report_csv(r);
  return out;
}

ExperimentConfig with_name(ExperimentConfig cfg, const std::string& experiment, int threads) {
  if (!experiment.empty()) cfg.experiment = experiment;
  if (threads >= 0) cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<ConeKind>(m, "ConeKind").value("product", ConeKind::product).value("lorentz", ConeKind::lorentz);
  py::enum_<Side>(m, "Side").value("primal", Side::primal).value("dual", Side::dual);

  py::class_<ConeDescriptor>(m, "Cone")
      .def_property_readonly("kind", [](const ConeDescriptor& c) { return to_string(c.kind); })
      .def_readonly("rank", &ConeDescriptor::rank)
      .def_readonly("dim", &ConeDescriptor::dim)
      .def_readonly("e_primal", &ConeDescriptor::e_primal)
      .def_readonly("e_dual", &ConeDescriptor::e_dual)
      .def_property_readonly("d", [](const ConeDescriptor& c) { return c.d.s; })
      .def_readonly("m_vec", &ConeDescriptor::m_vec);

  m.def("make_cone", [](const std::string& kind, int n) { return make_cone(cone_kind_from_string(kind), n); },
        py::arg("kind"), py::arg("rank_or_dim"));
  m.def("membership", [](const ConeDescriptor& c, Side side, const Vec& v) { return membership(c, side, v); });
  m.def(
      "delta_power",
      [](const ConeDescriptor& c, Side side, const Vec& s, const Vec& v) {
        return delta_power(c, side, PowerExponent(s), v);
      },
      py::arg("cone"), py::arg("side"), py::arg("s"), py::arg("v"));
  m.def("gamma_cone", [](const ConeDescriptor& c, const Vec& s) { return gamma_cone(c, PowerExponent(s)); });
  m.def("invariant_distance", &invariant_distance);

  m.def("experiment_names", &experiment_names);
  m.def(
      "run_config_text",
      [](const std::string& text, const std::string& experiment, int threads) {
        const ExperimentConfig cfg = with_name(parse_config(text), experiment, threads);
        TrialReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        return report_dict(r);
      },
      py::arg("text"), py::arg("experiment") = "", py::arg("threads") = -1);
  m.def(
      "run_config_file",
      [](const std::string& path, const std::string& experiment, int threads) {
        const ExperimentConfig cfg = with_name(load_config(path), experiment, threads);
        TrialReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        return report_dict(r);
      },
      py::arg("path"), py::arg("experiment") = "", py::arg("threads") = -1);
}

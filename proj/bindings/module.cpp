// Python bindings for the fixed-point toolkit: formula construction and
// inspection, depth analysis, fixed-point synthesis with certificates,
// certificate checking, and bounded countermodel search.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wgl/depth.hpp"
#include "wgl/formula.hpp"
#include "wgl/kernel.hpp"
#include "wgl/kripke.hpp"
#include "wgl/synth.hpp"

namespace py = pybind11;

namespace {

py::object countermodel_py(const wgl::Formula& a, unsigned n, unsigned max_worlds) {
  std::optional<wgl::Countermodel> cm = wgl::countermodel(a, n, max_worlds);
  if (!cm) return py::none();
  py::dict model;
  model["worlds"] = cm->model.worlds;
  py::list edges;
  for (const auto& [from, to] : cm->model.edges)
    edges.append(py::make_tuple(from, to));
  model["edges"] = edges;
  py::dict valuation;
  for (const auto& [var, worlds] : cm->model.valuation)
    valuation[py::str(var)] = worlds;
  model["valuation"] = valuation;
  py::dict out;
  out["model"] = model;
  out["world"] = cm->world;
  out["model_json"] = wgl::model_to_json(cm->model);
  return out;
}

py::dict check_certificate_py(const std::string& json_text) {
  wgl::Certificate cert = wgl::certificate_from_json(json_text);
  wgl::CheckReport rep = wgl::check(cert);
  py::dict out;
  out["ok"] = rep.ok;
  out["logic_n"] = cert.logic_n;
  out["lines"] = cert.lines.size();
  out["goal"] = wgl::to_text(cert.goal);
  if (!rep.ok) {
    out["line"] = rep.line;
    out["message"] = rep.message;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_wglfix, m) {
  m.doc() =
      "Fixed points of modalized formulas in the logics wGL_n, with "
      "Hilbert-style proof certificates and bounded countermodel search";

  py::class_<wgl::Formula>(m, "Formula")
      .def_static("falsum", &wgl::Formula::falsum)
      .def_static("var", &wgl::Formula::var, py::arg("name"))
      .def_static("implies", &wgl::Formula::implies, py::arg("lhs"), py::arg("rhs"))
      .def_static("box", &wgl::Formula::box, py::arg("inner"))
      .def_static("verum", &wgl::Formula::verum)
      .def_static("neg", &wgl::Formula::neg, py::arg("a"))
      .def_static("conj", &wgl::Formula::conj, py::arg("a"), py::arg("b"))
      .def_static("disj", &wgl::Formula::disj, py::arg("a"), py::arg("b"))
      .def_static("iff", &wgl::Formula::iff, py::arg("a"), py::arg("b"))
      .def_static("dia", &wgl::Formula::dia, py::arg("a"))
      .def_property_readonly("is_falsum", &wgl::Formula::is_falsum)
      .def_property_readonly("is_var", &wgl::Formula::is_var)
      .def_property_readonly("is_implies", &wgl::Formula::is_implies)
      .def_property_readonly("is_box", &wgl::Formula::is_box)
      .def_property_readonly("var_name", &wgl::Formula::var_name)
      .def_property_readonly("left", &wgl::Formula::left)
      .def_property_readonly("right", &wgl::Formula::right)
      .def_property_readonly("inner", &wgl::Formula::inner)
      .def("__eq__", [](const wgl::Formula& a, const wgl::Formula& b) { return a == b; },
           py::is_operator())
      .def("__ne__", [](const wgl::Formula& a, const wgl::Formula& b) { return a != b; },
           py::is_operator())
      .def("__hash__", &wgl::Formula::hash)
      .def("__str__", [](const wgl::Formula& f) { return wgl::to_text(f); })
      .def("__repr__", [](const wgl::Formula& f) {
        return "Formula(\"" + wgl::to_text(f) + "\")";
      });

  m.def(
      "parse",
      [](const std::string& text, bool allow_reserved) {
        return wgl::parse(text, wgl::ParseOptions{allow_reserved});
      },
      py::arg("text"), py::arg("allow_reserved") = false,
      "Parse a formula from the concrete syntax (false, true, variables, ->, "
      "~, &, |, <->, box, dia).");
  m.def(
      "to_text",
      [](const wgl::Formula& f, bool sugar) {
        return wgl::to_text(f, wgl::PrintOptions{sugar});
      },
      py::arg("f"), py::arg("sugar") = true,
      "Render a formula; sugar=False prints primitive connectives only.");

  m.def("simplify", &wgl::simplify, py::arg("f"),
        "Constant propagation and double-negation removal, equivalence-preserving.");
  m.def("substitute", &wgl::substitute, py::arg("a"), py::arg("var"), py::arg("b"),
        "Replace every occurrence of the variable.");
  m.def("atoms", &wgl::atoms, py::arg("a"), "Variable names occurring in the formula.");

  m.def("dep", &wgl::dep, py::arg("a"), py::arg("p"),
        "Set of modal depths at which the variable occurs.");
  m.def("dep_mod", &wgl::dep_mod, py::arg("a"), py::arg("p"), py::arg("n"),
        "Depths reduced modulo n.");
  m.def("is_modalized", &wgl::is_modalized, py::arg("a"), py::arg("p"),
        "True when every occurrence of the variable lies under a box.");

  m.def("box_power", &wgl::box_power, py::arg("k"), py::arg("a"),
        "k-fold boxing of the formula.");
  m.def("boxdot", &wgl::boxdot, py::arg("k"), py::arg("a"), py::arg("with_self") = false,
        "Conjunction box a & ... & box^k a, optionally with the formula itself.");
  m.def("iterate", &wgl::iterate, py::arg("a"), py::arg("p"), py::arg("k"),
        "k-fold composition of the formula with itself at the variable.");

  py::class_<wgl::FixedPointResult>(m, "FixedPointResult")
      .def_property_readonly(
          "fixed_point",
          [](const wgl::FixedPointResult& r) { return r.fixed_point; })
      .def_property_readonly(
          "trace",
          [](const wgl::FixedPointResult& r) {
            std::vector<std::pair<std::string, wgl::Formula>> stages;
            for (const auto& st : r.trace.stages)
              stages.emplace_back(st.label, st.formula);
            return stages;
          },
          "Construction stages as (label, formula) pairs.")
      .def_property_readonly(
          "trace_json",
          [](const wgl::FixedPointResult& r) { return wgl::trace_to_json(r.trace); })
      .def_property_readonly(
          "certificate_json",
          [](const wgl::FixedPointResult& r) -> py::object {
            if (!r.certificate) return py::none();
            return py::str(wgl::to_json(*r.certificate));
          },
          "Serialized equivalence certificate, when requested.");

  m.def(
      "fixed_point",
      [](const wgl::Formula& a, const std::string& p, unsigned n, bool want_cert) {
        return wgl::fixed_point(a, p, n, want_cert);
      },
      py::arg("a"), py::arg("p"), py::arg("n"), py::arg("want_cert") = false,
      "Fixed point F of a formula modalized in p: the logic wGL_n proves "
      "F <-> a(F). With want_cert=True, attaches a checkable certificate.");
  m.def("simple_fixed_point", &wgl::simple_fixed_point, py::arg("boxed"),
        py::arg("p"), py::arg("n"),
        "Shortcut fixed point for singleton depth profiles, or None.");

  m.def("check_certificate", &check_certificate_py, py::arg("json_text"),
        "Validate a serialized certificate with the trusted kernel.");

  m.def("countermodel", &countermodel_py, py::arg("a"), py::arg("n"),
        py::arg("max_worlds") = 3,
        "Search models on schema-validating frames for one refuting the "
        "formula; returns None or a dict with the model and failing world.");
}

#include "deltarel/cli.hpp"
#include "deltarel/counting.hpp"
#include "deltarel/errors.hpp"
#include "deltarel/gadgets.hpp"
#include "deltarel/reductions.hpp"
#include "deltarel/relevance.hpp"
#include "deltarel/relu.hpp"
#include "deltarel/shapley.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace deltarel;

namespace {

std::string frac(const DyadicProb& p) { return to_string(p.to_rational()); }

std::vector<std::size_t> variables(const SubsetMask& S) {
  std::vector<std::size_t> out;
  for (auto p : S.positions()) out.push_back(p + 1);
  return out;
}

SubsetMask mask(const Formula& f, const std::vector<std::size_t>& vars) {
  SubsetMask S(f.arity());
  for (auto v : vars) {
    if (v < 1 || v > f.arity()) throw std::invalid_argument("variable " + std::to_string(v) + " out of range");
    S.insert(v - 1);
  }
  return S;
}

Formula formula(const std::string& text, std::uint32_t arity) { return parse(text, arity); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact and sampled delta-relevance for Boolean formulas";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ArityMismatch>(m, "ArityMismatch", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  m.def("render", [](const std::string& text, std::uint32_t arity) { return render(formula(text, arity)); },
        py::arg("formula"), py::arg("arity") = 0);
  m.def("arity", [](const std::string& text) { return formula(text, 0).arity(); }, py::arg("formula"));
  m.def(
      "evaluate",
      [](const std::string& text, const std::string& x, std::uint32_t arity) {
        auto a = Assignment::from_string(x);
        return evaluate(formula(text, arity), a);
      },
      py::arg("formula"), py::arg("x"), py::arg("arity") = 0);
  m.def(
      "probability", [](const std::string& text, std::uint32_t arity) { return frac(satisfaction_probability(formula(text, arity))); },
      py::arg("formula"), py::arg("arity") = 0);
  m.def(
      "agreement",
      [](const std::string& text, const std::string& x, const std::vector<std::size_t>& S, std::uint32_t arity) {
        auto a = Assignment::from_string(x);
        auto f = formula(text, arity);
        return frac(conditional_agreement_probability(f, a, mask(f, S)));
      },
      py::arg("formula"), py::arg("x"), py::arg("S"), py::arg("arity") = 0);
  m.def(
      "is_delta_relevant",
      [](const std::string& text, const std::string& x, const std::vector<std::size_t>& S, const std::string& delta,
         std::uint32_t arity) {
        auto a = Assignment::from_string(x);
        auto f = formula(text, arity);
        return is_delta_relevant(f, a, mask(f, S), parse_rational(delta)).relevant;
      },
      py::arg("formula"), py::arg("x"), py::arg("S"), py::arg("delta"), py::arg("arity") = 0);
  m.def(
      "minimal_relevant_set",
      [](const std::string& text, const std::string& x, const std::string& delta, std::uint32_t arity) {
        auto a = Assignment::from_string(x);
        auto f = formula(text, arity);
        auto r = solve_min_relevant_input(f, a, parse_rational(delta));
        return py::make_tuple(variables(r.witness), frac(r.probability));
      },
      py::arg("formula"), py::arg("x"), py::arg("delta"), py::arg("arity") = 0);
  m.def(
      "shapley_values",
      [](const std::string& text, const std::string& x, std::uint32_t arity) {
        auto a = Assignment::from_string(x);
        auto v = shapley_values(formula(text, arity), a);
        std::vector<std::string> phi;
        for (const auto& p : v.phi) phi.push_back(to_string(p));
        return phi;
      },
      py::arg("formula"), py::arg("x"), py::arg("arity") = 0);
  m.def(
      "relu_layers",
      [](const std::string& text, std::uint32_t arity) {
        auto net = compile_to_relu(formula(text, arity));
        py::list layers;
        for (const auto& l : net.layers) layers.append(py::make_tuple(l.weights, l.bias));
        return layers;
      },
      py::arg("formula"), py::arg("arity") = 0);
  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        auto out = cli::run(args);
        return py::make_tuple(out.exit_code, out.report);
      },
      py::arg("args"), "Runs a command line and returns (exit_code, report_text).");
}

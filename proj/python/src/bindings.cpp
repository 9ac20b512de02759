#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussqfi/analytic.hpp"
#include "gaussqfi/fock.hpp"
#include "gaussqfi/interferometers.hpp"
#include "gaussqfi/optimizer.hpp"
#include "gaussqfi/qfi.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace gaussqfi;

namespace {

FisherResult qfi_by_route(const ScenarioConfig& c, const std::string& route) {
  const StateDerivativePair p = state_derivative(build(c), c.phi);
  if (route == "pure") return qfi_pure(p);
  if (route == "two_mode") return qfi_two_mode(p);
  if (route == "eigendecomp") return qfi_eigendecomp(p);
  if (route == "vectorized_oracle") return qfi_vectorized(p);
  throw std::invalid_argument("unknown route '" + route + "'");
}

}  // namespace

PYBIND11_MODULE(_gaussqfi, m) {
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<RouteNotApplicable>(m, "RouteNotApplicable", PyExc_ValueError);
  py::register_exception<InfeasibleScenario>(m, "InfeasibleScenario", PyExc_ValueError);

  py::enum_<Family>(m, "Family")
      .value("mzi", Family::mzi)
      .value("yurke", Family::yurke)
      .value("mandel", Family::mandel);
  py::enum_<Evaluator>(m, "Evaluator")
      .value("numeric", Evaluator::numeric)
      .value("analytic", Evaluator::analytic)
      .value("automatic", Evaluator::automatic);
  py::enum_<Readout>(m, "Readout")
      .value("truncated", Readout::truncated)
      .value("saturating", Readout::saturating);

  py::class_<ScenarioConfig>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("family", &ScenarioConfig::family)
      .def_readwrite("alpha", &ScenarioConfig::alpha)
      .def_readwrite("beta", &ScenarioConfig::beta)
      .def_readwrite("gamma", &ScenarioConfig::gamma)
      .def_readwrite("r1", &ScenarioConfig::r1)
      .def_readwrite("r2", &ScenarioConfig::r2)
      .def_readwrite("theta", &ScenarioConfig::theta)
      .def_readwrite("T", &ScenarioConfig::T)
      .def_readwrite("eta", &ScenarioConfig::eta)
      .def_readwrite("discard_a", &ScenarioConfig::discard_a)
      .def_readwrite("phi", &ScenarioConfig::phi)
      .def("__repr__", [](const ScenarioConfig& c) {
        return "<Scenario " + to_string(c.family) + " r1=" + std::to_string(c.r1) + " r2=" + std::to_string(c.r2) +
               " T=" + std::to_string(c.T) + " eta=" + std::to_string(c.eta) + ">";
      });

  py::class_<GaussianState>(m, "GaussianState")
      .def_property_readonly("mean", &GaussianState::mean)
      .def_property_readonly("cov", &GaussianState::cov)
      .def_property_readonly("modes", &GaussianState::modes)
      .def("satisfies_uncertainty", &GaussianState::satisfies_uncertainty, "tol"_a = kSpectralTol);
  m.def("output_state", [](const ScenarioConfig& c) { return evolve(build(c), c.phi); }, "scenario"_a);

  py::class_<FisherResult>(m, "FisherResult")
      .def_readonly("value", &FisherResult::value)
      .def_property_readonly("route", [](const FisherResult& r) { return to_string(r.route); })
      .def_readonly("regularization_used", &FisherResult::regularization_used)
      .def_readonly("min_gap", &FisherResult::min_gap)
      .def_readonly("condition", &FisherResult::condition);

  m.def("qfi", &qfi_by_route, "scenario"_a, "route"_a = "eigendecomp");
  m.def("scenario_qfi", &scenario_qfi, "scenario"_a, "evaluator"_a = Evaluator::automatic);
  m.def("n_phi", &n_phi, "scenario"_a);
  m.def("r1_max", &r1_max, "n_phi"_a);
  m.def("seed_for_target", &seed_for_target, "n_phi"_a, "r1"_a);
  m.def("with_dose", &with_dose, "scenario"_a, "n_phi"_a, "r1"_a);

  py::class_<CfiResult>(m, "CfiResult")
      .def_readonly("value", &CfiResult::value)
      .def_readonly("phi", &CfiResult::phi)
      .def_readonly("cutoff", &CfiResult::cutoff)
      .def_readonly("derivative_step", &CfiResult::derivative_step)
      .def_readonly("dropped_terms", &CfiResult::dropped_terms)
      .def_readonly("truncation_mass", &CfiResult::truncation_mass)
      .def_readonly("truncation_bound", &CfiResult::truncation_bound)
      .def_readonly("readout", &CfiResult::readout);
  m.def("cfi", &cfi, "scenario"_a, "cutoff"_a = 15, "derivative_step"_a = 1e-4, "readout"_a = Readout::truncated,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "fock_probabilities",
      [](const ScenarioConfig& c, std::vector<int> modes, int cutoff, Readout readout) {
        const FockDistribution d = fock_probabilities(evolve(build(c), c.phi), std::move(modes), cutoff, readout);
        return py::make_tuple(d.probabilities, d.truncation_mass);
      },
      "scenario"_a, "modes"_a = std::vector<int>{}, "cutoff"_a = 10, "readout"_a = Readout::truncated);

  py::class_<InnerSpec>(m, "InnerSpec")
      .def(py::init<>())
      .def_readwrite("optimize_r1", &InnerSpec::optimize_r1)
      .def_readwrite("optimize_r2", &InnerSpec::optimize_r2)
      .def_readwrite("optimize_varphi", &InnerSpec::optimize_varphi)
      .def_readwrite("r1_at_max", &InnerSpec::r1_at_max)
      .def_readwrite("tie_r2_to_r1", &InnerSpec::tie_r2_to_r1)
      .def_readwrite("r2_cap", &InnerSpec::r2_cap)
      .def_readwrite("tol", &InnerSpec::tol)
      .def_readwrite("evaluator", &InnerSpec::evaluator);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("best_value", &OptimizationResult::best_value)
      .def_readonly("best_params", &OptimizationResult::best_params)
      .def_readonly("evaluations", &OptimizationResult::evaluations)
      .def_readonly("converged", &OptimizationResult::converged)
      .def_readonly("degenerate", &OptimizationResult::degenerate)
      .def_readonly("optima", &OptimizationResult::optima);
  m.def("optimize", &optimize_scenario, "scenario"_a, "n_phi"_a, "inner"_a, py::call_guard<py::gil_scoped_release>());
  m.def("maximize_bounded", &maximize_bounded, "f"_a, "lo"_a, "hi"_a, "name"_a = "x", "tol"_a = 1e-8,
        "grid"_a = 32);
  m.def("t_critical_numeric", &t_critical_numeric, "n_phi"_a, "evaluator"_a = Evaluator::analytic,
        "tol"_a = 1e-7);

  py::module_ a = m.def_submodule("analytic");
  a.def("qfi_mzi", &analytic::qfi_mzi, "T"_a, "eta"_a, "n"_a);
  a.def("qfi_lossless", &analytic::qfi_lossless, "n"_a, "r1"_a);
  a.def("qfi_max_lossless", &analytic::qfi_max_lossless, "n"_a);
  a.def("qfi_internal", &analytic::qfi_internal, "T"_a, "n"_a, "r1"_a);
  a.def("t_critical", &analytic::t_critical, "n"_a);
  a.def("qfi_yurke_external", &analytic::qfi_yurke_external, "eta"_a, "n"_a, "r1"_a, "r2"_a, "varphi"_a);
  a.def("phi_opt_yurke", &analytic::phi_opt_yurke, "n"_a, "eta"_a, "r2"_a);
  a.def("qfi_yurke_external_opt_asymptotic", &analytic::qfi_yurke_external_opt_asymptotic, "n"_a, "eta"_a, "r2"_a);
  a.def("qfi_mandel_no_a", &analytic::qfi_mandel_no_a, "eta"_a, "n"_a, "r1"_a, "r2"_a);
  a.def("eta0", &analytic::eta0, "n"_a, "r2"_a, "exact"_a = true);
  a.def("qfi_mandel_full", &analytic::qfi_mandel_full, "eta"_a, "n"_a, "r1"_a, "r2"_a);
  a.def("r2_opt_mandel", [](double eta, double n) {
    const auto [r2, branch] = analytic::r2_opt_mandel(eta, n);
    return py::make_tuple(r2, branch.label == analytic::Branch::above_threshold);
  }, "eta"_a, "n"_a);
  a.def("qfi_equal_squeezing", &analytic::qfi_equal_squeezing, "eta"_a, "n"_a);
}

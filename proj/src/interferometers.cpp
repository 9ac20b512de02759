#include "gaussqfi/interferometers.hpp"

#include <cmath>
#include <sstream>

namespace gaussqfi {

std::string to_string(Family family) {
  switch (family) {
    case Family::mzi:
      return "mzi";
    case Family::yurke:
      return "yurke";
    case Family::mandel:
      return "mandel";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "mzi") return Family::mzi;
  if (name == "yurke") return Family::yurke;
  if (name == "mandel") return Family::mandel;
  throw std::invalid_argument("unknown interferometer family '" + name + "' (expected mzi, yurke or mandel)");
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(c.r1 >= 0.0) || !std::isfinite(c.r1)) fail("r1 must be a finite value >= 0");
  if (!(c.r2 >= 0.0) || !std::isfinite(c.r2)) fail("r2 must be a finite value >= 0");
  if (!(c.T >= 0.0 && c.T <= 1.0)) fail("T must lie in [0, 1]");
  if (!(c.eta >= 0.0 && c.eta <= 1.0)) fail("eta must lie in [0, 1]");
  if (c.family != Family::mandel) {
    if (c.gamma != Complex(0.0, 0.0)) fail("gamma seeds mode c, which only the mandel family has");
    if (c.discard_a) fail("discard_a only applies to the mandel family");
  }
  if (c.family == Family::mzi && (c.r1 != 0.0 || c.r2 != 0.0)) {
    fail("the mzi family has no squeezers; r1 and r2 must be 0");
  }
}

Circuit build(const ScenarioConfig& c) {
  validate(c);
  Circuit circuit;
  std::vector<Step> internal;
  std::vector<Step>& s = circuit.steps;

  auto place_phase_and_internal_loss = [&](std::vector<int> arms) {
    for (int m : arms) internal.push_back(LossStep{m, c.T});
    if (c.internal_loss_before_phase) {
      s.insert(s.end(), internal.begin(), internal.end());
      s.push_back(PhaseSlot{0});
    } else {
      s.push_back(PhaseSlot{0});
      s.insert(s.end(), internal.begin(), internal.end());
    }
  };

  switch (c.family) {
    case Family::mzi:
      circuit.n_modes = 2;
      circuit.seeds = {c.alpha, c.beta};
      circuit.labels = {"a", "b"};
      s.push_back(make_beam_splitter(0.5, 0, 1));
      place_phase_and_internal_loss({0, 1});
      s.push_back(make_beam_splitter(0.5, 0, 1));
      s.push_back(LossStep{0, c.eta});
      s.push_back(LossStep{1, c.eta});
      break;
    case Family::yurke:
      circuit.n_modes = 2;
      circuit.seeds = {c.alpha, c.beta};
      circuit.labels = {"a", "b"};
      s.push_back(make_tms(c.r1, 0.0, 0, 1));
      place_phase_and_internal_loss({0, 1});
      s.push_back(make_tms(c.r2, c.theta, 0, 1));
      s.push_back(LossStep{0, c.eta});
      s.push_back(LossStep{1, c.eta});
      break;
    case Family::mandel:
      circuit.n_modes = 3;
      circuit.seeds = {c.alpha, c.beta, c.gamma};
      circuit.labels = {"a", "b", "c"};
      s.push_back(make_tms(c.r1, 0.0, 0, 1));
      place_phase_and_internal_loss({0, 1});
      s.push_back(make_tms(c.r2, c.theta, 0, 2));
      s.push_back(make_beam_splitter(0.5, 1, 2));
      for (int m = 0; m < 3; ++m) s.push_back(LossStep{m, c.eta});
      if (c.discard_a) {
        s.push_back(DiscardStep{{0}});
        circuit.labels = {"b", "c"};
      }
      break;
  }
  return circuit;
}

double n_phi(const ScenarioConfig& c) {
  if (c.family == Family::mzi) return 0.5 * std::norm(c.alpha + c.beta);
  const double ch = std::cosh(c.r1);
  const double sh = std::sinh(c.r1);
  return ch * ch * std::norm(c.alpha) + sh * sh * (std::norm(c.beta) + 1.0) -
         2.0 * ch * sh * (c.alpha * c.beta).real();
}

double r1_max(double n_phi) {
  if (!(n_phi >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  return std::asinh(std::sqrt(n_phi));
}

Complex seed_for_target(double n_phi_target, double r1) {
  const double bound = r1_max(n_phi_target);
  if (r1 < 0.0) throw std::invalid_argument("r1 must be >= 0");
  const double sh2 = std::sinh(r1) * std::sinh(r1);
  if (sh2 > n_phi_target) {
    // Allow rounding at the boundary itself.
    if (r1 - bound > 1e-12 * std::max(1.0, bound)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "r1=" << r1 << " exceeds the feasible bound r1_max=arcsinh(sqrt(" << n_phi_target
          << "))=" << bound;
      throw InfeasibleScenario(msg.str(), bound);
    }
    return {0.0, 0.0};
  }
  const double ch2 = std::cosh(r1) * std::cosh(r1);
  return {std::sqrt((n_phi_target - sh2) / ch2), 0.0};
}

ScenarioConfig with_dose(ScenarioConfig base, double n_phi_target, double r1) {
  base.beta = {0.0, 0.0};
  if (base.family == Family::mzi) {
    if (!(n_phi_target >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
    base.r1 = 0.0;
    base.alpha = {std::sqrt(2.0 * n_phi_target), 0.0};
    return base;
  }
  base.r1 = r1;
  base.alpha = seed_for_target(n_phi_target, r1);
  return base;
}

}  // namespace gaussqfi

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "gaussqfi/analytic.hpp"
#include "gaussqfi/qfi.hpp"
#include "run_spec.hpp"

namespace gaussqfi::cli {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Complex small_seed(Rng& rng, double max_abs) {
  const double r = uniform(rng, 0.0, max_abs);
  const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return std::polar(r, a);
}

std::string describe(const ScenarioConfig& c) {
  std::ostringstream s;
  s.precision(6);
  s << to_string(c.family) << " T=" << c.T << " eta=" << c.eta << " r1=" << c.r1 << " r2=" << c.r2
    << " theta=" << c.theta << " phi=" << c.phi << " alpha=" << c.alpha << " beta=" << c.beta;
  if (c.family == Family::mandel) s << " gamma=" << c.gamma << (c.discard_a ? " (a discarded)" : "");
  return s.str();
}

double numeric_qfi(const ScenarioConfig& c) { return qfi(state_derivative(build(c), c.phi)).value; }

// Limit of the engine's value as phi approaches c.phi, from symmetric offsets
// delta and 2 delta with the delta^2 error term removed.
double numeric_phi_limit(const ScenarioConfig& c) {
  auto mean_at = [&](double delta) {
    ScenarioConfig up = c, down = c;
    up.phi += delta;
    down.phi -= delta;
    return 0.5 * (numeric_qfi(up) + numeric_qfi(down));
  };
  const double delta = 1e-3;
  return (4.0 * mean_at(delta) - mean_at(2.0 * delta)) / 3.0;
}

// Every fifth point is an edge case: a removable singularity of the formula
// (its guarded branch) or the boundary of its domain.
struct Case {
  std::string formula;
  std::function<ScenarioConfig(Rng&, bool singular)> draw;
  std::function<double(const ScenarioConfig&)> closed_form;
  // Singular points where the QFI itself jumps: compare with the limit along
  // phi, the direction the formula's guarded branch follows.
  std::function<bool(const ScenarioConfig&)> needs_phi_limit = nullptr;
};

std::vector<Case> cases() {
  std::vector<Case> out;
  out.push_back({"mzi",
                 [](Rng& rng, bool) {
                   ScenarioConfig c;
                   c.family = Family::mzi;
                   c.alpha = small_seed(rng, 3.0);
                   c.beta = small_seed(rng, 3.0);
                   c.T = uniform(rng, 0.05, 1.0);
                   c.eta = uniform(rng, 0.05, 1.0);
                   c.phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   return c;
                 },
                 [](const ScenarioConfig& c) { return analytic::qfi_mzi(c.T, c.eta, n_phi(c)); }});
  out.push_back({"internal_loss",
                 [](Rng& rng, bool singular) {
                   ScenarioConfig c;
                   c.family = uniform(rng, 0.0, 1.0) < 0.5 ? Family::yurke : Family::mandel;
                   c.r1 = singular ? 0.0 : uniform(rng, 0.0, 1.5);
                   c.r2 = uniform(rng, 0.0, 1.5);
                   c.theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   c.alpha = small_seed(rng, 2.0);
                   c.beta = small_seed(rng, 1.0);
                   if (c.family == Family::mandel) c.gamma = small_seed(rng, 1.0);
                   c.T = singular ? 1.0 : uniform(rng, 0.05, 1.0);
                   c.phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   return c;
                 },
                 [](const ScenarioConfig& c) { return analytic::qfi_internal(c.T, n_phi(c), c.r1); }});
  out.push_back({"yurke_external",
                 [](Rng& rng, bool singular) {
                   ScenarioConfig c;
                   c.family = Family::yurke;
                   c.r1 = uniform(rng, 0.0, 1.5);
                   c.alpha = small_seed(rng, 2.0);
                   c.beta = small_seed(rng, 1.0);
                   c.eta = uniform(rng, 0.05, 1.0);
                   c.phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   if (singular) {
                     // g = 1: either no squeezing at all, or r1 = r2 with
                     // varphi = pi where the second squeezer undoes the first.
                     if (uniform(rng, 0.0, 1.0) < 0.5) c.r1 = 0.0;
                     c.r2 = c.r1;
                     c.theta = std::numbers::pi - c.phi;
                   } else {
                     c.r2 = uniform(rng, 0.0, 2.0);
                     c.theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   }
                   return c;
                 },
                 [](const ScenarioConfig& c) {
                   return analytic::qfi_yurke_external(c.eta, n_phi(c), c.r1, c.r2, c.phi + c.theta);
                 },
                 [](const ScenarioConfig& c) {
                   // The output is a pure coherent state here while its neighbours
                   // along phi are mixed, so the QFI is discontinuous at the point.
                   return c.r1 > 0.0 && c.r1 == c.r2 && std::cos(c.phi + c.theta) < -1.0 + 1e-12;
                 }});
  auto mandel = [](bool discard) {
    return [discard](Rng& rng, bool singular) {
      ScenarioConfig c;
      c.family = Family::mandel;
      c.discard_a = discard;
      c.r1 = singular ? 0.0 : uniform(rng, 0.0, 1.5);
      c.r2 = singular ? 0.0 : uniform(rng, 0.0, 2.0);
      c.theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      c.alpha = small_seed(rng, 2.0);
      c.beta = small_seed(rng, 1.0);
      c.gamma = small_seed(rng, 1.0);
      c.eta = uniform(rng, 0.05, 1.0);
      c.phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      return c;
    };
  };
  out.push_back({"mandel_no_a", mandel(true), [](const ScenarioConfig& c) {
                   return analytic::qfi_mandel_no_a(c.eta, n_phi(c), c.r1, c.r2);
                 }});
  out.push_back({"mandel_full", mandel(false), [](const ScenarioConfig& c) {
                   return analytic::qfi_mandel_full(c.eta, n_phi(c), c.r1, c.r2);
                 }});
  out.push_back({"lossless_max",
                 [](Rng& rng, bool) {
                   ScenarioConfig c;
                   c.family = uniform(rng, 0.0, 1.0) < 0.5 ? Family::yurke : Family::mandel;
                   c.r1 = std::asinh(std::sqrt(std::exp(uniform(rng, std::log(0.01), std::log(20.0)))));
                   c.r2 = uniform(rng, 0.0, 1.5);
                   c.theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   c.phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                   return c;
                 },
                 [](const ScenarioConfig& c) { return analytic::qfi_max_lossless(n_phi(c)); }});
  return out;
}

}  // namespace

std::vector<VerifyLine> verify_suite(const VerifyOptions& options) {
  std::vector<VerifyLine> lines;
  Rng rng(options.seed);
  for (const Case& k : cases()) {
    VerifyLine line;
    line.formula = k.formula;
    for (int i = 0; i < options.points; ++i) {
      const ScenarioConfig c = k.draw(rng, i % 5 == 4);
      const double expected = k.closed_form(c);
      double got = 0.0;
      double rel = 0.0;
      try {
        got = k.needs_phi_limit && k.needs_phi_limit(c) ? numeric_phi_limit(c) : numeric_qfi(c);
        rel = std::abs(got - expected) / std::max(std::abs(expected), 1e-12);
      } catch (const std::exception&) {
        rel = std::numeric_limits<double>::infinity();
      }
      ++line.points;
      if (!(rel <= options.tolerance)) ++line.failures;
      if (!(rel <= line.worst_rel)) {
        line.worst_rel = rel;
        line.worst_at = describe(c);
      }
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace gaussqfi::cli

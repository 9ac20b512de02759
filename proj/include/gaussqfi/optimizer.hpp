#pragma once

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaussqfi/interferometers.hpp"
#include "gaussqfi/qfi.hpp"

namespace gaussqfi {

struct OptimizationResult {
  double best_value = 0.0;
  std::map<std::string, double> best_params;
  int evaluations = 0;
  bool converged = false;
  // Phase searches: objective flat to 1e-9 over the whole period.
  bool degenerate = false;
  // Phase searches: every distinct optimum whose value ties the best one.
  std::vector<double> optima;
};

using Objective = std::function<double(double)>;

/// Maximizes `f` on [lo, hi]: coarse grid, golden-section refinement in the
/// best bracket down to |dx| < tol, and explicit endpoint evaluation. An
/// interior point only wins if it beats both endpoints. Throws NumericalError
/// naming the offending argument if `f` returns a non-finite value.
OptimizationResult maximize_bounded(const Objective& f, double lo, double hi, const std::string& name,
                                    double tol = 1e-8, int grid = 32);

/// r1 over [0, arcsinh(sqrt(n_phi))].
OptimizationResult optimize_r1(const Objective& objective, double n_phi, double tol = 1e-8);

/// varphi over one period: 256-point grid, golden refinement of each grid
/// maximum, optima tied to 1e-9 all reported.
OptimizationResult optimize_phase(const Objective& objective, double tol = 1e-8, int grid = 256);

enum class Evaluator { numeric, analytic, automatic };

std::string to_string(Evaluator e);
Evaluator parse_evaluator(const std::string& name);

struct FormulaMatch {
  std::string name;  // mzi, internal_loss, yurke_external, mandel_no_a, mandel_full
  double value = 0.0;
};

/// The closed form covering this scenario's loss configuration, if any.
std::optional<FormulaMatch> matching_formula(const ScenarioConfig& config);

/// QFI of a scenario. `analytic` uses the closed form matching the loss
/// configuration and throws RouteNotApplicable when there is none;
/// `automatic` falls back to the numeric engine in that case.
double scenario_qfi(const ScenarioConfig& config, Evaluator evaluator);

/// What to optimize at each point. Nesting is r1 (outer), r2, varphi (inner).
struct InnerSpec {
  bool optimize_r1 = false;
  bool optimize_r2 = false;
  bool optimize_varphi = false;
  bool r1_at_max = false;     // fix r1 = arcsinh(sqrt(n_phi)) (no seeding)
  bool tie_r2_to_r1 = false;  // r2 follows r1
  double r2_cap = 5.0;
  double tol = 1e-8;
  Evaluator evaluator = Evaluator::automatic;
};

/// Optimizes one scenario at dose n_phi (mode-a seeding from with_dose).
/// Parameters reported: r1, r2, varphi, alpha_sq.
OptimizationResult optimize_scenario(const ScenarioConfig& base, double n_phi, const InnerSpec& inner);

/// Bisection on T for the point where the optimal r1 under internal loss
/// leaves 0.
double t_critical_numeric(double n_phi, Evaluator evaluator = Evaluator::analytic, double tol = 1e-7);

enum class SweepMode { optimal_qfi, fixed, t_critical };

std::string to_string(SweepMode m);
SweepMode parse_sweep_mode(const std::string& name);

struct SweepSpec {
  ScenarioConfig base;
  std::optional<double> n_phi;  // when set, seeding is chosen to meet it
  std::string axis;
  std::vector<double> values;
  std::string series;  // optional second parameter, one curve per value
  std::vector<double> series_values;
  SweepMode mode = SweepMode::optimal_qfi;
  InnerSpec inner;
  // Also evaluate this family at each optimum (varphi re-optimized for the
  // Yurke scheme when it has external loss).
  std::optional<Family> compare_family;
  int jobs = 1;
};

struct SweepPoint {
  double axis_value = 0.0;
  double series_value = 0.0;
  std::string status = "ok";  // or the reason the point was skipped
  OptimizationResult result;
  double n_phi = 0.0;
  double snl = 0.0;
  double mzi = 0.0;
  double compare_qfi = 0.0;
  double t_critical_formula = 0.0;
  double t_critical_numeric = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;
};

/// Settable parameter names: n_phi, r1, r2, theta, phi, varphi, T, eta,
/// alpha, beta, gamma (real amplitudes).
void set_parameter(ScenarioConfig& config, std::optional<double>& n_phi, const std::string& name, double value);

/// Throws std::invalid_argument for an unknown axis or a non-monotone range.
SweepResult sweep(const SweepSpec& spec);

/// CSV with a header row and 12 significant digits.
void write_csv(const SweepResult& result, std::ostream& out);

}  // namespace gaussqfi

#pragma once

#include <string>

#include "gaussqfi/circuit.hpp"

namespace gaussqfi {

enum class Family { mzi, yurke, mandel };

std::string to_string(Family family);
Family parse_family(const std::string& name);

/// One interferometer setting. Squeezer 1 has real parameter r1; squeezer 2
/// has r2 e^{i theta}. T is the internal transmission (both arms), eta the
/// external one (every detected mode).
struct ScenarioConfig {
  Family family = Family::yurke;
  Complex alpha{0.0, 0.0};
  Complex beta{0.0, 0.0};
  Complex gamma{0.0, 0.0};  // Mandel idler seed only
  double r1 = 0.0;
  double r2 = 0.0;
  double theta = 0.0;
  double T = 1.0;
  double eta = 1.0;
  bool discard_a = false;  // Mandel only
  double phi = 0.0;
  // Moves the internal loss in front of the phase slot. Only used to check
  // that the two placements agree.
  bool internal_loss_before_phase = false;
};

/// Throws std::invalid_argument for out-of-range parameters or fields that do
/// not apply to the family.
void validate(const ScenarioConfig& config);

Circuit build(const ScenarioConfig& config);

/// Photons passing through the phase: |alpha+beta|^2/2 for the MZI, and
/// cosh^2 r1 |alpha|^2 + sinh^2 r1 (|beta|^2+1) - 2 cosh r1 sinh r1 Re(alpha beta)
/// for the two nonlinear schemes.
double n_phi(const ScenarioConfig& config);

/// arcsinh(sqrt(N)): the largest r1 reachable without exceeding the dose.
double r1_max(double n_phi);

/// Real mode-a seed giving dose n_phi_target at squeezing r1. Throws
/// InfeasibleScenario when r1 > r1_max.
Complex seed_for_target(double n_phi_target, double r1);

/// Copy of `base` reseeded (mode a only) so that its dose is n_phi_target at
/// squeezing r1. For the MZI r1 is ignored.
ScenarioConfig with_dose(ScenarioConfig base, double n_phi_target, double r1);

}  // namespace gaussqfi

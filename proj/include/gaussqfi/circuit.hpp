#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gaussqfi/gaussian_state.hpp"

namespace gaussqfi {

/// Marks where the unknown phase phi is imprinted.
struct PhaseSlot {
  int mode = 0;
};

struct LossStep {
  int mode = 0;
  double transmission = 1.0;
};

/// Trace out modes (e.g. an undetected idler). Later steps use the reduced
/// indexing.
struct DiscardStep {
  std::vector<int> modes;
};

using Step = std::variant<SymplecticOp, PhaseSlot, LossStep, DiscardStep>;

struct Circuit {
  int n_modes = 1;
  std::vector<Complex> seeds;      // coherent amplitude per input mode
  std::vector<Step> steps;
  std::vector<std::string> labels; // names of the modes left at the output
};

/// Throws std::invalid_argument unless the circuit has exactly one phase slot
/// and all indices and transmissions are in range.
void validate(const Circuit& circuit);

GaussianState input_state(const Circuit& circuit);

GaussianState evolve(const Circuit& circuit, double phi);

/// Output state together with d(mean)/dphi and d(cov)/dphi, propagated
/// exactly through every step (all of which act linearly on the moments).
struct Tangent {
  GaussianState state;
  RealVector d_mean;
  RealMatrix d_cov;
};

Tangent evolve_with_derivative(const Circuit& circuit, double phi);

/// Mean photon number of the phase-slot mode just before the phase is applied.
double photons_at_phase(const Circuit& circuit);

}  // namespace gaussqfi

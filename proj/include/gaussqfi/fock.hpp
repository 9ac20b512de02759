#pragma once

#include <vector>

#include "gaussqfi/circuit.hpp"
#include "gaussqfi/interferometers.hpp"

namespace gaussqfi {

enum class Readout {
  truncated,   // counts above the cutoff are lost and show up as truncation_mass
  saturating,  // the top level `cutoff` collects every count >= cutoff
};

/// Photon-number distribution over some modes, truncated at `cutoff` photons
/// per mode. Probabilities are stored densely with the first mode most
/// significant. The missing mass is reported, never renormalized away.
struct FockDistribution {
  std::vector<int> detected_modes;
  int cutoff = 0;
  Readout readout = Readout::truncated;
  std::vector<double> probabilities;
  double truncation_mass = 0.0;

  double probability(const std::vector<int>& outcome) const;
};

inline constexpr int kMaxCutoff = 20;

/// Outcome probabilities of the reduced state on `detected_modes` (all modes
/// when empty), from the multidimensional Hermite recursion for Gaussian
/// density-matrix elements. Throws std::invalid_argument for cutoff > 20 or a
/// table over ~33M entries.
FockDistribution fock_probabilities(const GaussianState& state, std::vector<int> detected_modes, int cutoff);

/// Same outcome grid, but level `cutoff` of each detector means "cutoff or
/// more". Built by inclusion-exclusion over marginals of the detected modes,
/// so nothing is left unassigned apart from rounding.
FockDistribution saturating_fock_probabilities(const GaussianState& state, std::vector<int> detected_modes,
                                               int cutoff);

FockDistribution fock_probabilities(const GaussianState& state, std::vector<int> detected_modes, int cutoff,
                                    Readout readout);

/// Brute-force reference: evolves a truncated Fock-space density matrix
/// (coherent seeds, matrix-exponential TMS and BS, Kraus loss) and reads its
/// diagonal. At most 3 modes and cutoff 8; `internal_dim` photons per mode
/// (default cutoff + 5) are kept during evolution.
FockDistribution dense_fock_oracle(const Circuit& circuit, double phi, int cutoff, int internal_dim = 0);

struct CfiResult {
  double value = 0.0;
  double phi = 0.0;
  int cutoff = 0;
  double derivative_step = 0.0;
  int dropped_terms = 0;        // outcomes with p < 1e-12
  double truncation_mass = 0.0; // at phi
  Readout readout = Readout::truncated;
  // Truncated readout only: information the lost counts add when they are
  // pooled into one extra level instead of dropped. Zero for the saturating readout.
  double truncation_bound = 0.0;
};

/// Classical Fisher information of photon counting on every output mode of
/// the scenario (mode a excluded when discard_a), by central differences.
/// Throws NumericalError when halving the step flips the sign of a
/// significant derivative.
CfiResult cfi(const ScenarioConfig& config, int cutoff = 15, double derivative_step = 1e-4,
              Readout readout = Readout::truncated);

}  // namespace gaussqfi

#pragma once

#include <vector>

#include "gaussqfi/types.hpp"

namespace gaussqfi {

/// A Gaussian unitary on m modes, as a 2m x 2m real matrix in interleaved
/// (x1, p1, ..., xm, pm) order, together with the modes it acts on.
struct SymplecticOp {
  RealMatrix matrix;
  std::vector<int> modes;
};

/// Standard symplectic form for n modes in interleaved ordering.
RealMatrix symplectic_form(int n_modes);

/// max |F Omega F^T - Omega|.
double symplectic_defect(const RealMatrix& f);

SymplecticOp make_phase_shift(double phi, int mode = 0);

/// Derivative of the phase-shift matrix with respect to phi. Not symplectic.
RealMatrix phase_shift_derivative(double phi);

/// Two-mode squeezer with squeeze parameter r e^{i theta}; r >= 0.
SymplecticOp make_tms(double r, double theta, int mode_a = 0, int mode_b = 1);

/// Beam splitter with transmission eta in [0, 1].
SymplecticOp make_beam_splitter(double eta, int mode_a = 0, int mode_b = 1);

/// Permutation matrix P moving the quadratures of `front` to the first
/// slots, remaining modes keeping their relative order.
RealMatrix mode_permutation(const std::vector<int>& front, int n_modes);

/// Full 2n x 2n matrix P^{-1} diag(f, I) P for an op acting on a subset.
RealMatrix embed(const SymplecticOp& op, int n_modes);

}  // namespace gaussqfi

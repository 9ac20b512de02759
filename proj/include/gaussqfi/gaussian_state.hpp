#pragma once

#include <vector>

#include "gaussqfi/symplectic.hpp"
#include "gaussqfi/types.hpp"

namespace gaussqfi {

/// n-mode Gaussian state in the real quadrature convention: mean vector and
/// covariance in (x1, p1, ..., xn, pn) order with hbar = 1, so vacuum has
/// covariance I/2.
///
/// Values are immutable; every operation below returns a new state.
class GaussianState {
 public:
  /// Validates shapes and symmetry of `cov` (to 1e-12). Does not check the
  /// uncertainty relation; see `satisfies_uncertainty`.
  GaussianState(RealVector mean, RealMatrix cov);

  int modes() const { return static_cast<int>(mean_.size() / 2); }
  const RealVector& mean() const { return mean_; }
  const RealMatrix& cov() const { return cov_; }

  /// sigma + (i/2) Omega >= 0 up to `tol` on its smallest eigenvalue.
  bool satisfies_uncertainty(double tol = kSpectralTol) const;

 private:
  RealVector mean_;
  RealMatrix cov_;
};

/// Complex form in (a1..an, a1^dag..an^dag) order. Vacuum has sigma = I.
struct ComplexGaussianState {
  ComplexVector mean;
  ComplexMatrix cov;

  int modes() const { return static_cast<int>(mean.size() / 2); }
};

GaussianState vacuum_state(int n_modes);

/// Coherent displacement of one mode by `amplitude`.
GaussianState displace(const GaussianState& state, int mode, Complex amplitude);

GaussianState apply(const GaussianState& state, const SymplecticOp& op);

/// Pure loss with transmission T: a vacuum ancilla is appended, mixed in on a
/// beam splitter of transmission T, and traced out.
GaussianState apply_loss(const GaussianState& state, int mode, double transmission);

/// Same channel written directly as sigma -> T sigma + (1 - T) I/2 on the
/// affected block. Kept as a faster equivalent of `apply_loss`.
GaussianState apply_loss_direct(const GaussianState& state, int mode, double transmission);

/// Removes the listed modes. An empty list returns the state unchanged.
GaussianState trace_out(const GaussianState& state, const std::vector<int>& modes);

/// Permutation from interleaved (x1,p1,...) to block (x1..xn,p1..pn) order.
RealMatrix interleaved_to_block(int n_modes);

/// The unitary U = (1/sqrt2) [[I, iI], [I, -iI]] taking block quadratures to
/// ladder operators.
ComplexMatrix quadrature_to_ladder(int n_modes);

ComplexGaussianState to_complex(const GaussianState& state);

/// Same linear map applied to a (mean, covariance) tangent pair; used to
/// convert derivatives, which are not themselves valid states.
ComplexVector mean_to_complex(const RealVector& mean);
ComplexMatrix cov_to_complex(const RealMatrix& cov);

/// K = diag(I_n, -I_n).
ComplexMatrix k_matrix(int n_modes);

double mean_photon_number(const GaussianState& state, int mode);

/// Eigendecomposition sigma K = q diag(values) q^{-1}.
///
/// sigma K is similar to the Hermitian matrix sigma^{1/2} K sigma^{1/2}, so
/// the decomposition is taken from that matrix: values are real and sorted
/// ascending (n negative, then n positive for a valid state), and
/// q = sigma^{1/2} V stays well conditioned even when values repeat.
struct SigmaKEigen {
  RealVector values;
  ComplexMatrix q;
  ComplexMatrix q_inv;
  double condition = 1.0;  // 2-norm condition number of q
};

/// Requires `cov` Hermitian positive definite; throws NumericalError otherwise.
SigmaKEigen eigen_sigma_k(const ComplexMatrix& cov);

/// Symplectic eigenvalues (one per mode, ascending) as the moduli of the
/// eigenvalues of sigma K. Throws NumericalError if one falls below
/// 1 - 1e-9, which would mean the input violates the uncertainty relation.
std::vector<double> symplectic_eigenvalues(const ComplexGaussianState& state);

bool is_pure(const ComplexGaussianState& state, double tol = 1e-6);

}  // namespace gaussqfi

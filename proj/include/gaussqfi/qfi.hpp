#pragma once

#include <limits>
#include <string>

#include "gaussqfi/circuit.hpp"

namespace gaussqfi {

/// A complex-form state at phi together with its phi-derivatives.
struct StateDerivativePair {
  ComplexGaussianState state;
  ComplexMatrix d_cov;
  ComplexVector d_mean;
};

enum class Route { pure, two_mode, eigendecomp, vectorized_oracle, analytic };

std::string to_string(Route route);

struct FisherResult {
  double value = 0.0;
  Route route = Route::eigendecomp;
  bool regularization_used = false;
  // Smallest |lambda_i lambda_j - 1| seen (eigendecomposition routes) or
  // smallest |lambda_k^4 - 1| (two-mode route).
  double min_gap = std::numeric_limits<double>::infinity();
  double condition = 1.0;  // condition number of the eigenvector matrix
};

StateDerivativePair make_pair(const Tangent& tangent);

StateDerivativePair state_derivative(const Circuit& circuit, double phi);

/// Pure-state formula; throws RouteNotApplicable when some symplectic
/// eigenvalue is further than 1e-6 from 1.
FisherResult qfi_pure(const StateDerivativePair& pair);

/// Closed two-mode formula in terms of A = K sigma. Throws RouteNotApplicable
/// for other mode counts or when |A| = 1 (a pure state). A single pure
/// symplectic eigenvalue is handled by nu-regularization.
FisherResult qfi_two_mode(const StateDerivativePair& pair);

/// Eigendecomposition of sigma K; any n. Pairs with |lambda_i lambda_j - 1|
/// below the gap tolerance are evaluated by nu-regularization.
FisherResult qfi_eigendecomp(const StateDerivativePair& pair);

/// Direct inversion of the 4n^2 x 4n^2 matrix conj(sigma) (x) sigma - K (x) K.
/// Meant as an oracle for small n.
FisherResult qfi_vectorized(const StateDerivativePair& pair);

/// Default route (eigendecomposition).
FisherResult qfi(const StateDerivativePair& pair);

// Regularization schedule shared by the routes: nu = 1 + k h for k = 1, 2, 4,
// combined by second-order Richardson extrapolation to nu = 1.
inline constexpr double kNuStep = 1e-4;

/// Gap tolerance for |lambda_i lambda_j - 1|, scaled with the size of sigma.
double gap_tolerance(const ComplexMatrix& cov);

}  // namespace gaussqfi

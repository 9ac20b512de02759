#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gaussqfi {

using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Structural invariants (symmetry, Hermiticity, symplectic form) and spectral
// invariants (eigenvalue bounds) are checked at different precisions.
inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kSymplecticTol = 1e-10;
inline constexpr double kSpectralTol = 1e-9;

/// Raised when a numerical routine cannot produce a trustworthy value
/// (non-convergence, non-finite objective, route producing a negative QFI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a QFI route is asked to evaluate a state it does not apply to,
/// e.g. the pure-state formula on a mixed state.
class RouteNotApplicable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scenario whose requested photon dose cannot be met with the given
/// squeezing. Carries the largest feasible first-squeezer magnitude.
class InfeasibleScenario : public std::domain_error {
 public:
  InfeasibleScenario(const std::string& what, double r1_max)
      : std::domain_error(what), r1_max_(r1_max) {}
  double r1_max() const { return r1_max_; }

 private:
  double r1_max_;
};

}  // namespace gaussqfi

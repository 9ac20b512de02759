#include "gaussqfi/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace gaussqfi {

namespace {

void check_mode(int mode, int n_modes) {
  if (mode < 0 || mode >= n_modes) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for a " +
                            std::to_string(n_modes) + "-mode state");
  }
}

void check_transmission(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("transmission must lie in [0, 1], got " + std::to_string(t));
  }
}

RealMatrix symmetrized(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

GaussianState::GaussianState(RealVector mean, RealMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) {
    throw std::invalid_argument("mean vector must have positive even length");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw std::invalid_argument("covariance shape does not match mean vector");
  }
  if (!cov_.allFinite() || !mean_.allFinite()) {
    throw NumericalError("state contains non-finite entries");
  }
  const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kStructuralTol * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance is not symmetric (defect " + std::to_string(asym) + ")");
  }
}

bool GaussianState::satisfies_uncertainty(double tol) const {
  const int n = modes();
  ComplexMatrix m = cov_.cast<Complex>();
  m += Complex(0.0, 0.5) * symplectic_form(n).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

GaussianState vacuum_state(int n_modes) {
  if (n_modes < 1) {
    throw std::invalid_argument("vacuum_state: need at least one mode");
  }
  return {RealVector::Zero(2 * n_modes), 0.5 * RealMatrix::Identity(2 * n_modes, 2 * n_modes)};
}

GaussianState displace(const GaussianState& state, int mode, Complex amplitude) {
  check_mode(mode, state.modes());
  RealVector d = state.mean();
  d(2 * mode) += std::sqrt(2.0) * amplitude.real();
  d(2 * mode + 1) += std::sqrt(2.0) * amplitude.imag();
  return {d, state.cov()};
}

GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
  const RealMatrix f = embed(op, state.modes());
  return {f * state.mean(), symmetrized(f * state.cov() * f.transpose())};
}

GaussianState apply_loss(const GaussianState& state, int mode, double transmission) {
  const int n = state.modes();
  check_mode(mode, n);
  check_transmission(transmission);
  RealVector d = RealVector::Zero(2 * n + 2);
  d.head(2 * n) = state.mean();
  RealMatrix cov = 0.5 * RealMatrix::Identity(2 * n + 2, 2 * n + 2);
  cov.topLeftCorner(2 * n, 2 * n) = state.cov();
  const GaussianState extended(d, cov);
  const GaussianState mixed = apply(extended, make_beam_splitter(transmission, mode, n));
  return trace_out(mixed, {n});
}

GaussianState apply_loss_direct(const GaussianState& state, int mode, double transmission) {
  check_mode(mode, state.modes());
  check_transmission(transmission);
  const double t = std::sqrt(transmission);
  RealVector d = state.mean();
  RealMatrix cov = state.cov();
  d.segment(2 * mode, 2) *= t;
  cov.middleRows(2 * mode, 2) *= t;
  cov.middleCols(2 * mode, 2) *= t;
  cov.block(2 * mode, 2 * mode, 2, 2) += 0.5 * (1.0 - transmission) * RealMatrix::Identity(2, 2);
  return {d, cov};
}

GaussianState trace_out(const GaussianState& state, const std::vector<int>& modes) {
  const int n = state.modes();
  std::vector<bool> drop(n, false);
  for (int m : modes) {
    check_mode(m, n);
    drop[m] = true;
  }
  std::vector<int> keep;
  for (int m = 0; m < n; ++m) {
    if (!drop[m]) {
      keep.push_back(2 * m);
      keep.push_back(2 * m + 1);
    }
  }
  if (keep.empty()) {
    throw std::invalid_argument("trace_out: cannot remove every mode");
  }
  const int k = static_cast<int>(keep.size());
  RealVector d(k);
  RealMatrix cov(k, k);
  for (int i = 0; i < k; ++i) {
    d(i) = state.mean()(keep[i]);
    for (int j = 0; j < k; ++j) cov(i, j) = state.cov()(keep[i], keep[j]);
  }
  return {d, cov};
}

RealMatrix interleaved_to_block(int n_modes) {
  RealMatrix p = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    p(i, 2 * i) = 1.0;
    p(n_modes + i, 2 * i + 1) = 1.0;
  }
  return p;
}

ComplexMatrix quadrature_to_ladder(int n_modes) {
  const int n = n_modes;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const Complex i(0.0, 1.0);
  ComplexMatrix u(2 * n, 2 * n);
  u << id, i * id, id, -i * id;
  return u / std::sqrt(2.0);
}

ComplexVector mean_to_complex(const RealVector& mean) {
  const int n = static_cast<int>(mean.size() / 2);
  return quadrature_to_ladder(n) * (interleaved_to_block(n) * mean).cast<Complex>();
}

ComplexMatrix cov_to_complex(const RealMatrix& cov) {
  const int n = static_cast<int>(cov.rows() / 2);
  const ComplexMatrix w = quadrature_to_ladder(n) * interleaved_to_block(n).cast<Complex>();
  ComplexMatrix s = 2.0 * w * cov.cast<Complex>() * w.adjoint();
  return 0.5 * (s + s.adjoint());
}

ComplexGaussianState to_complex(const GaussianState& state) {
  return {mean_to_complex(state.mean()), cov_to_complex(state.cov())};
}

ComplexMatrix k_matrix(int n_modes) {
  ComplexMatrix k = ComplexMatrix::Identity(2 * n_modes, 2 * n_modes);
  k.bottomRightCorner(n_modes, n_modes) *= -1.0;
  return k;
}

double mean_photon_number(const GaussianState& state, int mode) {
  check_mode(mode, state.modes());
  const int x = 2 * mode;
  const int p = x + 1;
  const auto& s = state.cov();
  const auto& d = state.mean();
  return 0.5 * (s(x, x) + s(p, p) - 1.0) + 0.5 * (d(x) * d(x) + d(p) * d(p));
}

SigmaKEigen eigen_sigma_k(const ComplexMatrix& cov) {
  const int dim = static_cast<int>(cov.rows());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> cov_es(cov);
  if (cov_es.info() != Eigen::Success) {
    throw NumericalError("eigen_sigma_k: covariance eigensolver did not converge");
  }
  const RealVector w = cov_es.eigenvalues();
  if (w.minCoeff() <= 0.0) {
    throw NumericalError("eigen_sigma_k: covariance is not positive definite");
  }
  const ComplexMatrix& v = cov_es.eigenvectors();
  const ComplexMatrix root = v * w.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
  const ComplexMatrix root_inv = v * w.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();

  ComplexMatrix h = root * k_matrix(dim / 2) * root;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> h_es(h);
  if (h_es.info() != Eigen::Success) {
    throw NumericalError("eigen_sigma_k: eigensolver did not converge");
  }
  SigmaKEigen out;
  out.values = h_es.eigenvalues();
  out.q = root * h_es.eigenvectors();
  out.q_inv = h_es.eigenvectors().adjoint() * root_inv;
  out.condition = std::sqrt(w.maxCoeff() / w.minCoeff());
  return out;
}

std::vector<double> symplectic_eigenvalues(const ComplexGaussianState& state) {
  const SigmaKEigen e = eigen_sigma_k(state.cov);
  const int n = state.modes();
  // Values come as the pairs -nu_k, +nu_k; the positive half carries them.
  std::vector<double> nu(n);
  for (int k = 0; k < n; ++k) {
    nu[k] = 0.5 * (std::abs(e.values(n - 1 - k)) + std::abs(e.values(n + k)));
  }
  std::sort(nu.begin(), nu.end());
  if (nu.front() < 1.0 - kSpectralTol) {
    throw NumericalError("symplectic eigenvalue " + std::to_string(nu.front()) +
                         " below 1: state violates the uncertainty relation");
  }
  return nu;
}

bool is_pure(const ComplexGaussianState& state, double tol) {
  for (double nu : symplectic_eigenvalues(state)) {
    if (std::abs(nu - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace gaussqfi

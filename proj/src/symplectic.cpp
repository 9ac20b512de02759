#include "gaussqfi/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaussqfi {

RealMatrix symplectic_form(int n_modes) {
  RealMatrix omega = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

double symplectic_defect(const RealMatrix& f) {
  if (f.rows() != f.cols() || f.rows() % 2 != 0) {
    throw std::invalid_argument("symplectic_defect: matrix must be square of even size");
  }
  const RealMatrix omega = symplectic_form(static_cast<int>(f.rows() / 2));
  return (f * omega * f.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticOp make_phase_shift(double phi, int mode) {
  RealMatrix f(2, 2);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  f << c, s, -s, c;
  return {f, {mode}};
}

RealMatrix phase_shift_derivative(double phi) {
  RealMatrix f(2, 2);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  f << -s, c, -c, -s;
  return f;
}

SymplecticOp make_tms(double r, double theta, int mode_a, int mode_b) {
  if (!(r >= 0.0)) {
    throw std::invalid_argument("make_tms: squeezing magnitude must be >= 0, got " + std::to_string(r));
  }
  RealMatrix s_theta(2, 2);
  s_theta << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  const RealMatrix id = RealMatrix::Identity(2, 2);
  RealMatrix f(4, 4);
  f << std::cosh(r) * id, -std::sinh(r) * s_theta, -std::sinh(r) * s_theta, std::cosh(r) * id;
  return {f, {mode_a, mode_b}};
}

SymplecticOp make_beam_splitter(double eta, int mode_a, int mode_b) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("make_beam_splitter: transmission must lie in [0, 1], got " +
                                std::to_string(eta));
  }
  const RealMatrix id = RealMatrix::Identity(2, 2);
  const double t = std::sqrt(eta);
  const double r = std::sqrt(1.0 - eta);
  RealMatrix f(4, 4);
  f << t * id, r * id, -r * id, t * id;
  return {f, {mode_a, mode_b}};
}

RealMatrix mode_permutation(const std::vector<int>& front, int n_modes) {
  std::vector<int> order;
  order.reserve(n_modes);
  std::vector<bool> used(n_modes, false);
  for (int m : front) {
    if (m < 0 || m >= n_modes) {
      throw std::out_of_range("mode index " + std::to_string(m) + " out of range for " +
                              std::to_string(n_modes) + " modes");
    }
    if (used[m]) {
      throw std::invalid_argument("repeated mode index " + std::to_string(m));
    }
    used[m] = true;
    order.push_back(m);
  }
  for (int m = 0; m < n_modes; ++m) {
    if (!used[m]) order.push_back(m);
  }
  // Row k of P selects the k-th quadrature of the permuted basis.
  RealMatrix p = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    p(2 * k, 2 * order[k]) = 1.0;
    p(2 * k + 1, 2 * order[k] + 1) = 1.0;
  }
  return p;
}

RealMatrix embed(const SymplecticOp& op, int n_modes) {
  const int m = static_cast<int>(op.modes.size());
  if (op.matrix.rows() != 2 * m || op.matrix.cols() != 2 * m) {
    throw std::invalid_argument("embed: matrix size does not match the number of modes");
  }
  if (m > n_modes) {
    throw std::invalid_argument("embed: op acts on more modes than the state has");
  }
  const RealMatrix p = mode_permutation(op.modes, n_modes);
  RealMatrix block = RealMatrix::Identity(2 * n_modes, 2 * n_modes);
  block.topLeftCorner(2 * m, 2 * m) = op.matrix;
  // P is orthogonal, so P^{-1} = P^T.
  return p.transpose() * block * p;
}

}  // namespace gaussqfi

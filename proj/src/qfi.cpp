#include "gaussqfi/qfi.hpp"

#include <cmath>
#include <functional>

#include <Eigen/LU>

namespace gaussqfi {

namespace {

double richardson(const std::function<double(double)>& f) {
  const double f1 = f(1.0 + kNuStep);
  const double f2 = f(1.0 + 2.0 * kNuStep);
  const double f4 = f(1.0 + 4.0 * kNuStep);
  return (8.0 * f1 - 6.0 * f2 + f4) / 3.0;
}

double clamp_nonnegative(double value, const char* route) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string(route) + " route produced a non-finite QFI");
  }
  if (value < 0.0) {
    if (value >= -kSpectralTol) return 0.0;
    throw NumericalError(std::string(route) + " route produced a negative QFI (" + std::to_string(value) + ")");
  }
  return value;
}

// 2 dd^dag sigma^{-1} dd, with sigma scaled by nu.
double displacement_term(const ComplexMatrix& cov, const ComplexVector& dd, double nu) {
  if (dd.squaredNorm() == 0.0) return 0.0;
  const ComplexVector x = (nu * cov).ldlt().solve(dd);
  return 2.0 * dd.dot(x).real();
}

}  // namespace

std::string to_string(Route route) {
  switch (route) {
    case Route::pure:
      return "pure";
    case Route::two_mode:
      return "two_mode";
    case Route::eigendecomp:
      return "eigendecomp";
    case Route::vectorized_oracle:
      return "vectorized_oracle";
    case Route::analytic:
      return "analytic";
  }
  return "unknown";
}

double gap_tolerance(const ComplexMatrix& cov) {
  return 1e-10 * std::max(1.0, cov.cwiseAbs().rowwise().sum().maxCoeff());
}

StateDerivativePair make_pair(const Tangent& t) {
  ComplexMatrix ds = cov_to_complex(t.d_cov);
  return {to_complex(t.state), ds, mean_to_complex(t.d_mean)};
}

StateDerivativePair state_derivative(const Circuit& circuit, double phi) {
  return make_pair(evolve_with_derivative(circuit, phi));
}

FisherResult qfi_pure(const StateDerivativePair& p) {
  for (double nu : symplectic_eigenvalues(p.state)) {
    if (std::abs(nu - 1.0) > 1e-6) {
      throw RouteNotApplicable("pure-state QFI requested for a mixed state (symplectic eigenvalue " +
                               std::to_string(nu) + ")");
    }
  }
  const auto llt = p.state.cov.ldlt();
  const ComplexMatrix x = llt.solve(p.d_cov);
  FisherResult r;
  r.route = Route::pure;
  r.value = clamp_nonnegative(0.25 * (x * x).trace().real() + displacement_term(p.state.cov, p.d_mean, 1.0),
                              "pure");
  return r;
}

FisherResult qfi_two_mode(const StateDerivativePair& p) {
  if (p.state.modes() != 2) {
    throw RouteNotApplicable("two-mode QFI requested for a " + std::to_string(p.state.modes()) + "-mode state");
  }
  const ComplexMatrix k = k_matrix(2);
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);

  // Returns the covariance part of the formula and the smallest |lambda^4 - 1|.
  auto evaluate = [&](double nu, double* gap) {
    const ComplexMatrix a = nu * k * p.state.cov;
    const ComplexMatrix da = nu * k * p.d_cov;
    const Eigen::PartialPivLU<ComplexMatrix> a_lu(a);
    const double det = a_lu.determinant().real();
    const double tr = (a * a).trace().real();
    const double dtr = 2.0 * (a * da).trace().real();
    const ComplexMatrix x = a_lu.solve(da);
    const double ddet = det * x.trace().real();

    double disc = tr * tr - 16.0 * det;
    double root = 0.0;
    double droot = 0.0;
    if (disc > 0.0) {
      root = std::sqrt(disc);
      droot = (tr * dtr - 8.0 * ddet) / root;
    }
    const double u1 = 0.25 * (tr + root);
    const double u2 = 0.25 * (tr - root);
    const double l1 = std::sqrt(u1);
    const double l2 = std::sqrt(u2);
    const double dl1 = 0.25 * (dtr + droot) / (2.0 * l1);
    const double dl2 = 0.25 * (dtr - droot) / (2.0 * l2);
    const double g1 = l1 * l1 * l1 * l1 - 1.0;
    const double g2 = l2 * l2 * l2 * l2 - 1.0;
    if (gap) *gap = std::min(std::abs(g1), std::abs(g2));

    const ComplexMatrix ia = id + a * a;
    const Eigen::PartialPivLU<ComplexMatrix> ia_lu(ia);
    const ComplexMatrix y = ia_lu.solve(da);
    double lam_term = 0.0;
    if (l1 != l2) {
      lam_term = 4.0 * (l1 * l1 - l2 * l2) * (-dl1 * dl1 / g1 + dl2 * dl2 / g2);
    }
    const double bracket = det * (x * x).trace().real() +
                           std::sqrt(ia_lu.determinant().real()) * (y * y).trace().real() + lam_term;
    return bracket / (2.0 * (det - 1.0));
  };

  const double det = (k * p.state.cov).determinant().real();
  if (std::abs(det - 1.0) < 1e-10) {
    throw RouteNotApplicable("two-mode QFI formula is singular for a pure state (|A| = 1)");
  }
  FisherResult r;
  r.route = Route::two_mode;
  double gap = 0.0;
  double cov_part = evaluate(1.0, &gap);
  r.min_gap = gap;
  if (gap < 1e-8) {
    cov_part = richardson([&](double nu) { return evaluate(nu, nullptr) + displacement_term(p.state.cov, p.d_mean, nu); });
    r.regularization_used = true;
    r.value = clamp_nonnegative(cov_part, "two_mode");
    return r;
  }
  r.value = clamp_nonnegative(cov_part + displacement_term(p.state.cov, p.d_mean, 1.0), "two_mode");
  return r;
}

FisherResult qfi_eigendecomp(const StateDerivativePair& p) {
  const int dim = static_cast<int>(p.state.cov.rows());
  const SigmaKEigen e = eigen_sigma_k(p.state.cov);
  const ComplexMatrix k = k_matrix(dim / 2);
  const ComplexMatrix sigma = e.q_inv * p.d_cov * k * e.q;
  const double tol = gap_tolerance(p.state.cov);

  FisherResult r;
  r.route = Route::eigendecomp;
  r.condition = e.condition;

  double direct = 0.0;
  double singular_direct_nu[3] = {0.0, 0.0, 0.0};
  const double nus[3] = {1.0 + kNuStep, 1.0 + 2.0 * kNuStep, 1.0 + 4.0 * kNuStep};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double prod = e.values(i) * e.values(j);
      const double gap = std::abs(prod - 1.0);
      r.min_gap = std::min(r.min_gap, gap);
      const double num = (sigma(j, i) * sigma(i, j)).real();
      if (gap < tol) {
        // sigma -> nu sigma scales lambda and the derivative by nu.
        for (int s = 0; s < 3; ++s) {
          singular_direct_nu[s] += 0.5 * nus[s] * nus[s] * num / (nus[s] * nus[s] * prod - 1.0);
        }
        r.regularization_used = true;
      } else {
        direct += 0.5 * num / (prod - 1.0);
      }
    }
  }
  double value = direct;
  if (r.regularization_used) {
    value += (8.0 * singular_direct_nu[0] - 6.0 * singular_direct_nu[1] + singular_direct_nu[2]) / 3.0;
  }
  // sigma^{-1} = K q lambda^{-1} q^{-1}.
  if (p.d_mean.squaredNorm() > 0.0) {
    const ComplexVector w = e.q_inv * p.d_mean;
    const ComplexVector z = e.q * w.cwiseQuotient(e.values.cast<Complex>());
    value += 2.0 * p.d_mean.dot(k * z).real();
  }
  r.value = clamp_nonnegative(value, "eigendecomp");
  return r;
}

FisherResult qfi_vectorized(const StateDerivativePair& p) {
  const int dim = static_cast<int>(p.state.cov.rows());
  const ComplexMatrix k = k_matrix(dim / 2);
  const SigmaKEigen e = eigen_sigma_k(p.state.cov);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) gap = std::min(gap, std::abs(e.values(i) * e.values(j) - 1.0));

  auto evaluate = [&](double nu) {
    const ComplexMatrix s = nu * p.state.cov;
    const ComplexMatrix ds = nu * p.d_cov;
    ComplexMatrix m(dim * dim, dim * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m.block(i * dim, j * dim, dim, dim) = std::conj(s(i, j)) * s;
    // K (x) K is diagonal with entries k_i k_j.
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i * dim + j, i * dim + j) -= k(i, i) * k(j, j);
    const Eigen::Map<const ComplexVector> v(ds.data(), dim * dim);
    const ComplexVector x = m.partialPivLu().solve(v);
    return 0.5 * v.dot(x).real() + displacement_term(p.state.cov, p.d_mean, nu);
  };

  FisherResult r;
  r.route = Route::vectorized_oracle;
  r.min_gap = gap;
  r.condition = e.condition;
  if (gap < gap_tolerance(p.state.cov)) {
    r.regularization_used = true;
    r.value = clamp_nonnegative(richardson(evaluate), "vectorized_oracle");
  } else {
    r.value = clamp_nonnegative(evaluate(1.0), "vectorized_oracle");
  }
  return r;
}

FisherResult qfi(const StateDerivativePair& pair) { return qfi_eigendecomp(pair); }

}  // namespace gaussqfi

#include "gaussqfi/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gaussqfi::analytic {

namespace {

constexpr double kGuard = 1e-12;

double sq(double x) { return x * x; }

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

void check_dose(double n, double r1) {
  if (!(n >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  if (!(r1 >= 0.0)) throw std::invalid_argument("r1 must be >= 0");
  if (sq(std::sinh(r1)) > n * (1.0 + 1e-12) + 1e-15) {
    throw std::invalid_argument("r1=" + std::to_string(r1) + " exceeds arcsinh(sqrt(n)) for n=" +
                                std::to_string(n));
  }
}

}  // namespace

double qfi_mzi(double T, double eta, double n) {
  check_unit(T, "T");
  check_unit(eta, "eta");
  return 4.0 * T * eta * n;
}

double qfi_lossless(double n, double r1) {
  check_dose(n, r1);
  const double c2 = sq(std::cosh(r1));
  const double s2 = sq(std::sinh(r1));
  return 4.0 * c2 * n + 4.0 * s2 * n - 4.0 * s2 * s2;
}

double qfi_max_lossless(double n) {
  if (!(n >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  return 4.0 * n * (n + 1.0);
}

double qfi_internal(double T, double n, double r1) {
  check_unit(T, "T");
  check_dose(n, r1);
  const double s2 = sq(std::sinh(r1));
  return sq(T) * sq(std::sinh(2.0 * r1)) / (1.0 + 2.0 * T * (1.0 - T) * s2) +
         4.0 * T * (1.0 + 2.0 * T * s2) / (1.0 + 4.0 * T * (1.0 - T) * s2) * (n - s2);
}

double t_critical(double n) {
  if (!(n > 0.0)) throw std::invalid_argument("t_critical needs a positive photon dose");
  // The +/- branches for n above/below 1/2 are one expression once the
  // factor (2n - 1) is moved under the root; this form is also finite at n = 1/2.
  const double s = 2.0 * n - 1.0;
  return (s + std::sqrt(s * s + 16.0 * n)) / (8.0 * n);
}

double qfi_yurke_external(double eta, double n, double r1, double r2, double varphi) {
  check_unit(eta, "eta");
  check_dose(n, r1);
  // g - 1 and the numerator below both vanish on the singular set, so they are
  // written as sums of squares instead of differences of O(cosh^2 2r2) terms.
  const double gm1 = 2.0 * sq(std::sinh(r1 - r2)) +
                     2.0 * sq(std::cos(0.5 * varphi)) * std::sinh(2.0 * r1) * std::sinh(2.0 * r2);
  double first;
  if (std::abs(gm1) < kGuard) {
    // g = 1 only for r1 = r2 with cos(varphi) = -1 (or r1 = r2 = 0); limit
    // taken along varphi.
    first = eta * sq(std::sinh(2.0 * r1)) * (2.0 - eta);
  } else {
    const double num = 2.0 * eta * gm1 + 2.0 * (1.0 - eta) * sq(std::sin(varphi)) * sq(std::sinh(2.0 * r2));
    first = eta * sq(std::sinh(2.0 * r1)) * num / (2.0 * gm1 * (eta * (1.0 - eta) * gm1 + 1.0));
  }
  const double second = 4.0 * eta * (eta * std::cosh(2.0 * r1) + (1.0 - eta) * std::cosh(2.0 * r2)) *
                        (n - sq(std::sinh(r1))) / (1.0 + 2.0 * eta * (1.0 - eta) * gm1);
  return first + second;
}

std::pair<double, double> phi_opt_yurke(double n, double eta, double r2) {
  if (!(n > 0.0)) throw std::invalid_argument("phi_opt_yurke needs a positive photon dose");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("phi_opt_yurke needs eta in (0, 1]");
  const double root = std::sqrt(n * (n + 1.0));
  const double c = -2.0 * root / (2.0 * n + 1.0) +
                   (1.0 - eta) * root / (2.0 * sq(2.0 * n + 1.0) * eta * sq(std::cosh(r2)));
  const double phi1 = std::acos(std::clamp(c, -1.0, 1.0));
  return {phi1, 2.0 * std::numbers::pi - phi1};
}

double qfi_yurke_external_opt_asymptotic(double n, double eta, double r2) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  return qfi_max_lossless(n) * (1.0 - (1.0 - eta) * (2.0 * n + 1.0) / (2.0 * eta * sq(std::cosh(r2))));
}

double qfi_mandel_no_a(double eta, double n, double r1, double r2) {
  check_unit(eta, "eta");
  check_dose(n, r1);
  const double cm1 = sq(std::cosh(r1)) * sq(std::cosh(r2)) - 1.0;
  const double first = cm1 < kGuard ? 0.0 : eta * sq(std::sinh(2.0 * r1)) * sq(std::sinh(r2)) / cm1;
  const double second = 4.0 * eta * sq(std::sinh(r2)) * (1.0 - eta + eta * std::cosh(2.0 * r1)) *
                        (n - sq(std::sinh(r1))) / (1.0 + 2.0 * eta * cm1);
  return first + second;
}

double eta0_exact(double n, double r1, double r2) {
  if (!(n >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  if (!(r2 > 0.0)) throw std::invalid_argument("eta0 needs r2 > 0");
  const double y = sq(std::cosh(r2));
  const double c = sq(std::cosh(r1)) * y;
  const double omega = 2.0 * (n + 1.0) * y * sq(c - 1.0) - 4.0 * c * c + 4.0 * c;
  const double disc = omega * omega + 16.0 * (n + 1.0) * c * y * sq(c - 1.0) * (c - 2.0);
  if (disc < 0.0) throw std::domain_error("eta0_exact: no real threshold for these parameters");
  return (omega + std::sqrt(disc)) / (8.0 * (n + 1.0) * y * sq(c - 1.0));
}

double eta0_asymptotic(double n, double r2) {
  if (!(n >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  return 0.5 - 1.0 / (2.0 * (n + 1.0) * sq(std::cosh(r2)));
}

double eta0(double n, double r2, bool exact) {
  return exact ? eta0_exact(n, std::asinh(std::sqrt(n)), r2) : eta0_asymptotic(n, r2);
}

double qfi_mandel_no_a_above_eta0(double eta, double n, double r2) {
  check_unit(eta, "eta");
  return 4.0 * eta * n * (1.0 - n / ((n + 1.0) * sq(std::cosh(r2))));
}

double qfi_mandel_no_a_below_eta0(double eta, double n, double r2) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  return 2.0 * n * (1.0 - 1.0 / (2.0 * eta * sq(std::sinh(r2))));
}

double qfi_mandel_full(double eta, double n, double r1, double r2) {
  check_unit(eta, "eta");
  check_dose(n, r1);
  const double ch1 = sq(std::cosh(r1));
  const double ch2 = sq(std::cosh(r2));
  const double cm1 = ch1 * ch2 - 1.0;
  double first = 0.0;
  if (cm1 >= kGuard) {
    const double num = 2.0 * eta * (1.0 - eta) * (1.0 + ch1 * ch2 * ch2) +
                       (2.0 * eta - 1.0) * ch2 * (eta * ch1 - (1.0 - eta)) - 1.0;
    first = eta * sq(std::sinh(2.0 * r1)) * num / (cm1 * (1.0 + 2.0 * eta * (1.0 - eta) * cm1));
  }
  const double second = 4.0 * eta * (1.0 - eta + eta * std::cosh(2.0 * r1)) *
                        (eta + (1.0 - eta) * std::cosh(2.0 * r2)) * (n - sq(std::sinh(r1))) /
                        (1.0 + 4.0 * eta * (1.0 - eta) * cm1);
  return first + second;
}

double qfi_mandel_full_below_half(double eta, double n, double r2) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  return 2.0 * n * (1.0 - (1.0 - 2.0 * eta) / (4.0 * eta * (1.0 - eta) * sq(std::sinh(r2))));
}

double r2_zero_threshold(double eta) {
  if (!(eta > 0.5 && eta <= 1.0)) throw std::invalid_argument("r2_zero_threshold needs eta in (1/2, 1]");
  const double u = 1.0 - 2.0 * eta * (1.0 - eta);
  return (2.0 * u + std::sqrt(2.0 * u)) / (2.0 * eta * (2.0 * eta - 1.0)) - 1.0;
}

std::pair<double, Branch> r2_opt_mandel(double eta, double n) {
  if (!(n >= 0.0)) throw std::invalid_argument("photon dose must be >= 0");
  const double threshold = r2_zero_threshold(eta);
  if (n > threshold) return {0.0, Branch{Branch::above_threshold, threshold}};
  const double x = (threshold + 1.0) / (1.0 + n);
  if (x < 1.0) throw std::domain_error("r2_opt_mandel: arccosh argument below 1");
  return {std::acosh(std::sqrt(x)), Branch{Branch::below_threshold, threshold}};
}

double qfi_mandel_full_r2_zero(double eta, double n) {
  check_unit(eta, "eta");
  return 4.0 * eta * eta * n * (n + 1.0) / (1.0 + 2.0 * n * eta * (1.0 - eta));
}

double qfi_mandel_full_r2_interior(double eta, double n) {
  check_unit(eta, "eta");
  return 4.0 * eta * n *
         (1.0 + eta * n * (1.0 - 2.0 * (1.0 - eta) * (2.0 * eta - 1.0) -
                           2.0 * (1.0 - eta) * std::sqrt(2.0 - 4.0 * eta * (1.0 - eta))));
}

double qfi_equal_squeezing(double eta, double n) {
  check_unit(eta, "eta");
  return eta * (2.0 - eta) * qfi_max_lossless(n);
}

}  // namespace gaussqfi::analytic

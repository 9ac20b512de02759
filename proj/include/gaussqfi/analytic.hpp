#pragma once

#include <utility>

namespace gaussqfi::analytic {

/// Which side of a threshold a closed-form optimum falls on.
struct Branch {
  enum Label { below_threshold, above_threshold };
  Label label = below_threshold;
  double threshold_value = 0.0;
};

// Below, n is the photon dose through the phase, r1 and r2 the squeezer
// magnitudes, T the internal and eta the external transmission. Functions
// needing r1 <= arcsinh(sqrt(n)) throw std::invalid_argument otherwise.

/// 4 T eta n: the coherent-seeded MZI. With T = eta = 1 this is the shot-noise
/// reference.
double qfi_mzi(double T, double eta, double n);

double qfi_lossless(double n, double r1);
double qfi_max_lossless(double n);

/// Yurke or Mandel with internal loss only.
double qfi_internal(double T, double n, double r1);

/// Transmission above which squeezing beats the seeded MZI under internal loss.
double t_critical(double n);

/// Yurke with external loss only, as a function of varphi = phi + theta.
double qfi_yurke_external(double eta, double n, double r1, double r2, double varphi);

/// The two optimal varphi values (first in [pi/2, pi]) from the large-r2
/// expansion, sinh^2 r1 = n.
std::pair<double, double> phi_opt_yurke(double n, double eta, double r2);

/// Large-r2 optimum of the Yurke external-loss QFI:
/// I_max (1 - (1-eta)(2n+1) / (2 eta cosh^2 r2)).
double qfi_yurke_external_opt_asymptotic(double n, double eta, double r2);

/// Mandel, external loss, mode a discarded. Independent of phases and of the
/// idler seed.
double qfi_mandel_no_a(double eta, double n, double r1, double r2);

/// Loss level separating the r1 = 0 and r1 = r1_max optima of
/// qfi_mandel_no_a. The exact value depends on r1 as well as n.
double eta0_exact(double n, double r1, double r2);
double eta0_asymptotic(double n, double r2);
/// `exact` selects eta0_exact evaluated at r1 = arcsinh(sqrt(n)).
double eta0(double n, double r2, bool exact);

/// Large-r2 maxima of qfi_mandel_no_a above and below eta0.
double qfi_mandel_no_a_above_eta0(double eta, double n, double r2);
double qfi_mandel_no_a_below_eta0(double eta, double n, double r2);

/// Mandel, external loss, all modes kept.
double qfi_mandel_full(double eta, double n, double r1, double r2);

/// Large-r2 maximum of qfi_mandel_full for eta < 1/2 (reached at r1 = 0).
double qfi_mandel_full_below_half(double eta, double n, double r2);

/// Right-hand side of the dose condition under which r2 = 0 is optimal for
/// eta > 1/2.
double r2_zero_threshold(double eta);

/// Optimal r2 for the all-modes Mandel scheme at r1 = r1_max, eta > 1/2.
/// above_threshold means n exceeds r2_zero_threshold and r2 = 0.
std::pair<double, Branch> r2_opt_mandel(double eta, double n);

/// qfi_mandel_full at r1 = r1_max with r2 = 0 and with r2 at the interior
/// optimum, in closed form.
double qfi_mandel_full_r2_zero(double eta, double n);
double qfi_mandel_full_r2_interior(double eta, double n);

/// Unseeded Yurke with r1 = r2 at varphi = pi: eta (2 - eta) I_max.
double qfi_equal_squeezing(double eta, double n);

}  // namespace gaussqfi::analytic

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gaussqfi/analytic.hpp"
#include "gaussqfi/circuit.hpp"
#include "gaussqfi/interferometers.hpp"
#include "gaussqfi/qfi.hpp"

using namespace gaussqfi;

namespace {

Circuit coherent_phase(Complex alpha) {
  Circuit c;
  c.n_modes = 1;
  c.seeds = {alpha};
  c.steps = {PhaseSlot{0}};
  return c;
}

ScenarioConfig random_two_mode(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScenarioConfig c;
  c.family = Family::yurke;
  c.r1 = 1.2 * u(rng);
  c.r2 = 1.5 * u(rng);
  c.theta = 6.28 * u(rng);
  c.phi = 6.28 * u(rng);
  c.alpha = std::polar(1.5 * u(rng), 6.28 * u(rng));
  c.beta = std::polar(u(rng), 6.28 * u(rng));
  c.T = 0.2 + 0.8 * u(rng);
  c.eta = 0.1 + 0.9 * u(rng);
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Circuit, ValidationRejectsBrokenCircuits) {
  Circuit c = coherent_phase({1.0, 0.0});
  c.steps.push_back(PhaseSlot{0});
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.steps = {};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.steps = {PhaseSlot{1}};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.steps = {PhaseSlot{0}, LossStep{0, 1.3}};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.steps = {PhaseSlot{0}, DiscardStep{{0}}};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.seeds = {};
  c.steps = {PhaseSlot{0}};
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Circuit, DerivativeMatchesFiniteDifferences) {
  std::mt19937 rng(3);
  for (Family f : {Family::mzi, Family::yurke, Family::mandel}) {
    ScenarioConfig c = random_two_mode(rng);
    c.family = f;
    if (f == Family::mzi) c.r1 = c.r2 = 0.0;
    if (f == Family::mandel) c.gamma = {0.3, -0.2};
    const Circuit circ = build(c);
    const Tangent t = evolve_with_derivative(circ, c.phi);
    const double h = 1e-5;
    const GaussianState up = evolve(circ, c.phi + h), down = evolve(circ, c.phi - h);
    const RealMatrix fd_cov = (up.cov() - down.cov()) / (2 * h);
    const RealVector fd_mean = (up.mean() - down.mean()) / (2 * h);
    EXPECT_LT((fd_cov - t.d_cov).cwiseAbs().maxCoeff(), 1e-8) << to_string(f);
    EXPECT_LT((fd_mean - t.d_mean).cwiseAbs().maxCoeff(), 1e-8) << to_string(f);
  }
}

TEST(Circuit, VacuumInputKeepsZeroMeanDerivative) {
  ScenarioConfig c;
  c.r1 = 0.5;
  c.r2 = 0.3;
  c.eta = 0.7;
  const Tangent t = evolve_with_derivative(build(c), 0.4);
  EXPECT_LT(t.d_mean.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Qfi, CoherentStateGivesFourAlphaSquared) {
  for (Complex a : {Complex(1.0, 0.0), Complex(0.3, -1.7), Complex(2.5, 0.5)}) {
    const StateDerivativePair p = state_derivative(coherent_phase(a), 0.8);
    EXPECT_NEAR(qfi_pure(p).value, 4 * std::norm(a), 1e-12);
    EXPECT_LT(rel(qfi_eigendecomp(p).value, 4 * std::norm(a)), 1e-10);
    EXPECT_LT(rel(qfi_vectorized(p).value, 4 * std::norm(a)), 1e-10);
  }
}

TEST(Qfi, VacuumGivesZero) {
  const StateDerivativePair p = state_derivative(coherent_phase({0.0, 0.0}), 1.0);
  EXPECT_NEAR(qfi_pure(p).value, 0.0, 1e-14);
  EXPECT_NEAR(qfi(p).value, 0.0, 1e-12);
  ScenarioConfig c;
  EXPECT_NEAR(qfi(state_derivative(build(c), 0.3)).value, 0.0, 1e-12);
}

TEST(Qfi, ThermalStateWithoutPhaseDependenceGivesZero) {
  StateDerivativePair p;
  p.state = to_complex(trace_out(apply(vacuum_state(2), make_tms(0.7, 0.0)), {1}));
  p.d_cov = ComplexMatrix::Zero(2, 2);
  p.d_mean = ComplexVector::Zero(2);
  EXPECT_NEAR(qfi_eigendecomp(p).value, 0.0, 1e-14);
  EXPECT_NEAR(qfi_vectorized(p).value, 0.0, 1e-14);
}

TEST(Qfi, LosslessOptimum) {
  for (double n : {0.1, 1.0, 10.0}) {
    ScenarioConfig c;
    c.r1 = r1_max(n);
    for (Family f : {Family::yurke, Family::mandel}) {
      c.family = f;
      const StateDerivativePair p = state_derivative(build(c), 0.0);
      const FisherResult r = qfi(p);
      EXPECT_LT(rel(r.value, 4 * n * (n + 1)), 1e-6) << n;
      EXPECT_TRUE(r.regularization_used);
      EXPECT_LT(rel(qfi_pure(p).value, 4 * n * (n + 1)), 1e-9);
      EXPECT_LT(rel(qfi_vectorized(p).value, 4 * n * (n + 1)), 1e-6);
    }
  }
}

TEST(Qfi, PureRouteRefusesMixedStates) {
  ScenarioConfig c;
  c.r1 = 0.4;
  c.eta = 0.5;
  EXPECT_THROW(qfi_pure(state_derivative(build(c), 0.2)), RouteNotApplicable);
}

TEST(Qfi, TwoModeRouteNeedsTwoMixedModes) {
  ScenarioConfig c;
  c.r1 = 0.4;
  EXPECT_THROW(qfi_two_mode(state_derivative(build(c), 0.2)), RouteNotApplicable);
  c.family = Family::mandel;
  c.eta = 0.6;
  EXPECT_THROW(qfi_two_mode(state_derivative(build(c), 0.2)), RouteNotApplicable);
}

TEST(Qfi, RoutesAgreeOnRandomLossyScenarios) {
  std::mt19937 rng(17);
  for (int k = 0; k < 40; ++k) {
    const ScenarioConfig c = random_two_mode(rng);
    const StateDerivativePair p = state_derivative(build(c), c.phi);
    const double e = qfi_eigendecomp(p).value;
    EXPECT_LT(rel(qfi_two_mode(p).value, e), 1e-6);
    EXPECT_LT(rel(qfi_vectorized(p).value, e), 1e-6);
  }
}

TEST(Qfi, YurkeExternalLossMatchesClosedForm) {
  const double n = 0.1, r2 = 1.0, eta = 0.7;
  ScenarioConfig c;
  c.r1 = r1_max(n);
  c.r2 = r2;
  c.eta = eta;
  c.theta = analytic::phi_opt_yurke(n, eta, r2).first;
  const double engine = qfi(state_derivative(build(c), 0.0)).value;
  EXPECT_NEAR(engine, analytic::qfi_yurke_external(eta, n, c.r1, r2, c.theta), 1e-8);
}

TEST(Qfi, MandelReducedStateMatchesClosedForm) {
  ScenarioConfig c;
  c.family = Family::mandel;
  c.discard_a = true;
  c.r1 = 0.25;
  c.r2 = 1.3;
  c.eta = 0.6;
  c.beta = {0.4, 0.1};
  const StateDerivativePair p = state_derivative(build(c), 0.9);
  EXPECT_EQ(p.state.modes(), 2);
  EXPECT_NEAR(qfi_two_mode(p).value, analytic::qfi_mandel_no_a(0.6, n_phi(c), 0.25, 1.3), 1e-8);
}

TEST(Qfi, LossFreeStateRegularizedRouteMatchesPureRoute) {
  std::mt19937 rng(23);
  for (int k = 0; k < 10; ++k) {
    ScenarioConfig c = random_two_mode(rng);
    c.T = c.eta = 1.0;
    const StateDerivativePair p = state_derivative(build(c), c.phi);
    EXPECT_LT(rel(qfi_eigendecomp(p).value, qfi_pure(p).value), 1e-6);
  }
}

// A phi-independent unitary after the phase slot leaves the QFI unchanged.
TEST(Invariants, UnitaryInvariance) {
  std::mt19937 rng(29);
  for (int k = 0; k < 10; ++k) {
    const ScenarioConfig c = random_two_mode(rng);
    Circuit circ = build(c);
    const double before = qfi(state_derivative(circ, c.phi)).value;
    circ.steps.push_back(make_beam_splitter(0.37, 0, 1));
    circ.steps.push_back(make_tms(0.8, 1.1, 0, 1));
    circ.steps.push_back(make_phase_shift(2.2, 1));
    EXPECT_LT(rel(qfi(state_derivative(circ, c.phi)).value, before), 1e-7);
  }
}

// Extra loss or discarding a mode after the phase never increases the QFI.
TEST(Invariants, DataProcessingMonotonicity) {
  std::mt19937 rng(31);
  for (int k = 0; k < 10; ++k) {
    ScenarioConfig c = random_two_mode(rng);
    c.family = Family::mandel;
    c.gamma = {0.2, 0.1};
    Circuit circ = build(c);
    const double base = qfi(state_derivative(circ, c.phi)).value;
    Circuit lossier = circ;
    lossier.steps.push_back(LossStep{1, 0.5});
    EXPECT_LE(qfi(state_derivative(lossier, c.phi)).value, base * (1 + 1e-9));
    Circuit reduced = circ;
    reduced.steps.push_back(DiscardStep{{0}});
    EXPECT_LE(qfi(state_derivative(reduced, c.phi)).value, base * (1 + 1e-9));
  }
}

TEST(Qfi, InternalLossPlacementDoesNotMatter) {
  std::mt19937 rng(37);
  for (int k = 0; k < 10; ++k) {
    ScenarioConfig c = random_two_mode(rng);
    const double after = qfi(state_derivative(build(c), c.phi)).value;
    c.internal_loss_before_phase = true;
    EXPECT_LT(rel(qfi(state_derivative(build(c), c.phi)).value, after), 1e-9);
  }
}

TEST(Qfi, GapToleranceScalesWithCovariance) {
  const ComplexMatrix small = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix big = 1e6 * ComplexMatrix::Identity(4, 4);
  EXPECT_DOUBLE_EQ(gap_tolerance(small), 1e-10);
  EXPECT_GT(gap_tolerance(big), 1e-5);
}

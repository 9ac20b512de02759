#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gaussqfi/analytic.hpp"
#include "gaussqfi/optimizer.hpp"

using namespace gaussqfi;

namespace {

InnerSpec r1_only() {
  InnerSpec inner;
  inner.optimize_r1 = true;
  return inner;
}

// Width of the varphi interval where the normalized QFI exceeds 90% of its peak.
double peak_width(double n) {
  const double eta = 0.5, r2 = 5.0, r1 = r1_max(n);
  const int grid = 200000;
  double best = 0.0;
  std::vector<double> v(grid);
  for (int i = 0; i < grid; ++i) {
    v[i] = analytic::qfi_yurke_external(eta, n, r1, r2, std::numbers::pi * i / grid);
    best = std::max(best, v[i]);
  }
  int above = 0;
  for (double x : v) above += x >= 0.9 * best;
  return std::numbers::pi * above / grid;
}

std::string csv_of(const SweepSpec& spec) {
  std::ostringstream s;
  write_csv(sweep(spec), s);
  return s.str();
}

}  // namespace

TEST(Maximize, InteriorQuadratic) {
  const auto r = maximize_bounded([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, "x");
  EXPECT_NEAR(r.best_params.at("x"), 0.3, 1e-7);
  EXPECT_TRUE(r.converged);
}

TEST(Maximize, EndpointWins) {
  const auto r = maximize_bounded([](double x) { return x * x * x; }, -1.0, 2.0, "x");
  EXPECT_DOUBLE_EQ(r.best_params.at("x"), 2.0);
  EXPECT_DOUBLE_EQ(r.best_value, 8.0);
  const auto l = maximize_bounded([](double x) { return -x; }, 0.0, 1.0, "x");
  EXPECT_DOUBLE_EQ(l.best_params.at("x"), 0.0);
}

TEST(Maximize, NeverBelowEndpoints) {
  auto f = [](double x) { return std::sin(7 * x) + 0.1 * x; };
  const auto r = maximize_bounded(f, 0.0, 3.0, "x");
  EXPECT_GE(r.best_value, std::max(f(0.0), f(3.0)) - 1e-9);
}

TEST(Maximize, NonFiniteObjectiveNamesArgument) {
  try {
    maximize_bounded([](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x; }, 0.0, 1.0,
                     "r1");
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("r1="), std::string::npos);
  }
}

TEST(Maximize, DegenerateInterval) {
  const auto r = optimize_r1([](double x) { return x; }, 0.0);
  EXPECT_EQ(r.best_params.at("r1"), 0.0);
}

TEST(OptimizeR1, LosslessReachesBound) {
  const auto r = optimize_r1([](double r1) { return analytic::qfi_lossless(0.1, r1); }, 0.1);
  EXPECT_NEAR(r.best_params.at("r1"), r1_max(0.1), 1e-8);
  EXPECT_NEAR(r.best_value, 0.44, 1e-12);
}

TEST(OptimizeR1, InternalLossBelowThresholdPicksZero) {
  ScenarioConfig base;
  base.T = 0.8;
  const auto r = optimize_scenario(base, 0.1, r1_only());
  EXPECT_EQ(r.best_params.at("r1"), 0.0);
  EXPECT_NEAR(r.best_value, 0.32, 1e-12);
  EXPECT_NEAR(r.best_params.at("alpha_sq"), 0.1, 1e-12);
}

TEST(OptimizeR1, BranchSwitchAroundTCritical) {
  const double tc = analytic::t_critical(0.1);
  ScenarioConfig base;
  for (double T : {0.6, 0.75, tc - 0.01}) {
    base.T = T;
    EXPECT_EQ(optimize_scenario(base, 0.1, r1_only()).best_params.at("r1"), 0.0) << T;
  }
  for (double T : {tc + 0.011, 0.95, 1.0}) {
    base.T = T;
    const auto r = optimize_scenario(base, 0.1, r1_only());
    const double r1 = r.best_params.at("r1");
    EXPECT_GT(r1, 0.0) << T;
    ScenarioConfig c = base;
    c.r1 = r1;
    c.alpha = std::sqrt(r.best_params.at("alpha_sq"));
    EXPECT_NEAR(n_phi(c), 0.1, 1e-12);
    EXPECT_GT(r.best_value, 4 * T * 0.1);
  }
}

TEST(OptimizeR1, NumericAndAnalyticEvaluatorsAgree) {
  ScenarioConfig base;
  base.T = 0.93;
  InnerSpec inner = r1_only();
  inner.evaluator = Evaluator::numeric;
  const auto numeric = optimize_scenario(base, 0.1, inner);
  inner.evaluator = Evaluator::analytic;
  const auto analytic = optimize_scenario(base, 0.1, inner);
  EXPECT_NEAR(numeric.best_value, analytic.best_value, 1e-6 * analytic.best_value);
  EXPECT_NEAR(numeric.best_params.at("r1"), analytic.best_params.at("r1"), 1e-4);
}

TEST(OptimizeR1, MandelFullStrongLossPicksZero) {
  ScenarioConfig base;
  base.family = Family::mandel;
  base.eta = 0.3;
  InnerSpec inner = r1_only();
  inner.optimize_r2 = true;
  const auto r = optimize_scenario(base, 0.1, inner);
  EXPECT_EQ(r.best_params.at("r1"), 0.0);
  EXPECT_NEAR(r.best_params.at("r2"), 5.0, 1e-9);
  EXPECT_NEAR(r.best_value, analytic::qfi_mandel_full(0.3, 0.1, 0.0, 5.0), 1e-9);
}

TEST(OptimizeR2, MatchesClosedFormArgmax) {
  for (double eta : {0.6, 0.8}) {
    ScenarioConfig base;
    base.family = Family::mandel;
    base.eta = eta;
    InnerSpec inner;
    inner.r1_at_max = true;
    inner.optimize_r2 = true;
    const auto r = optimize_scenario(base, 0.1, inner);
    const double expected = analytic::r2_opt_mandel(eta, 0.1).first;
    EXPECT_NEAR(r.best_params.at("r2"), expected, 1e-4) << eta;
    EXPECT_NEAR(r.best_value, analytic::qfi_mandel_full_r2_interior(eta, 0.1), 1e-6 * r.best_value);
  }
}

TEST(OptimizePhase, ConstantIsDegenerate) {
  const auto r = optimize_phase([](double) { return 1.5; });
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.best_value, 1.5);
}

TEST(OptimizePhase, YurkeOptimaSymmetricAboutPi) {
  const double n = 0.1, eta = 0.5, r2 = 5.0;
  const auto r = optimize_phase(
      [&](double vp) { return analytic::qfi_yurke_external(eta, n, r1_max(n), r2, vp); });
  ASSERT_EQ(r.optima.size(), 2u);
  EXPECT_NEAR(r.optima[0] + r.optima[1], 2 * std::numbers::pi, 1e-6);
  const auto [p1, p2] = analytic::phi_opt_yurke(n, eta, r2);
  EXPECT_NEAR(r.optima[0], p1, 1e-3);
  EXPECT_NEAR(r.optima[1], p2, 1e-3);
}

TEST(OptimizePhase, PeakNarrowsWithDose) { EXPECT_LT(peak_width(10.0), peak_width(0.1)); }

TEST(OptimizeScenario, YurkeNumericPhaseSearchMatchesFormula) {
  ScenarioConfig base;
  base.eta = 0.5;
  base.r2 = 2.0;
  InnerSpec inner;
  inner.r1_at_max = true;
  inner.optimize_varphi = true;
  inner.evaluator = Evaluator::numeric;
  const auto r = optimize_scenario(base, 0.1, inner);
  const double vp = r.best_params.at("varphi");
  EXPECT_NEAR(r.best_value, analytic::qfi_yurke_external(0.5, 0.1, r1_max(0.1), 2.0, vp), 1e-8);
}

TEST(OptimizeScenario, EqualSqueezing) {
  for (double eta : {0.3, 0.5, 0.9}) {
    ScenarioConfig base;
    base.eta = eta;
    InnerSpec inner;
    inner.r1_at_max = true;
    inner.tie_r2_to_r1 = true;
    inner.optimize_varphi = true;
    const auto r = optimize_scenario(base, 0.1, inner);
    EXPECT_NEAR(r.best_value, analytic::qfi_equal_squeezing(eta, 0.1), 1e-9) << eta;
    EXPECT_NEAR(r.best_params.at("varphi"), std::numbers::pi, 1e-5);
  }
}

TEST(ScenarioQfi, AnalyticNeedsMatchingFormula) {
  ScenarioConfig c;
  c.r1 = 0.2;
  c.T = 0.8;
  c.eta = 0.7;
  EXPECT_FALSE(matching_formula(c));
  EXPECT_THROW(scenario_qfi(c, Evaluator::analytic), RouteNotApplicable);
  EXPECT_GT(scenario_qfi(c, Evaluator::automatic), 0.0);
  c.family = Family::mandel;
  c.discard_a = true;
  c.eta = 1.0;
  EXPECT_FALSE(matching_formula(c));
  c.T = 1.0;
  c.eta = 0.7;
  ASSERT_TRUE(matching_formula(c));
  EXPECT_EQ(matching_formula(c)->name, "mandel_no_a");
}

TEST(TCritical, NumericSearchMatchesFormula) {
  EXPECT_NEAR(t_critical_numeric(0.1), analytic::t_critical(0.1), 1e-3);
  EXPECT_NEAR(t_critical_numeric(0.1, Evaluator::numeric, 1e-5), 0.8708, 1e-3);
}

TEST(Sweep, RejectsBadSpecs) {
  SweepSpec s;
  s.n_phi = 0.1;
  s.axis = "warp";
  s.values = {0.5, 0.6};
  EXPECT_THROW(sweep(s), std::invalid_argument);
  s.axis = "T";
  s.values = {0.5, 0.5};
  EXPECT_THROW(sweep(s), std::invalid_argument);
  s.values = {};
  EXPECT_THROW(sweep(s), std::invalid_argument);
}

TEST(Sweep, InfeasiblePointRecordedAndSweepContinues) {
  SweepSpec s;
  s.n_phi = 0.1;
  s.mode = SweepMode::fixed;
  s.axis = "r1";
  s.values = {0.1, 0.2, 0.5, 0.6};
  s.inner.evaluator = Evaluator::numeric;
  const SweepResult r = sweep(s);
  ASSERT_EQ(r.points.size(), 4u);
  EXPECT_EQ(r.points[0].status, "ok");
  EXPECT_EQ(r.points[1].status, "ok");
  EXPECT_NE(r.points[2].status, "ok");
  EXPECT_NE(r.points[2].status.find("r1_max"), std::string::npos);
  EXPECT_NE(r.points[3].status, "ok");
}

TEST(Sweep, CsvIsByteStableAcrossJobCounts) {
  SweepSpec s;
  s.n_phi = 0.1;
  s.axis = "T";
  for (int i = 0; i <= 10; ++i) s.values.push_back(0.5 + 0.05 * i);
  s.inner = r1_only();
  const std::string one = csv_of(s);
  EXPECT_EQ(one, csv_of(s));
  s.jobs = 4;
  EXPECT_EQ(one, csv_of(s));
  EXPECT_EQ(one.substr(0, one.find('\n')), "T,r1_opt,r2_opt,varphi_opt,alpha_sq,qfi,snl,mzi,status");
}

TEST(Sweep, InternalLossCrossesMziAtTCritical) {
  SweepSpec s;
  s.n_phi = 0.1;
  s.axis = "T";
  for (int i = 0; i <= 100; ++i) s.values.push_back(0.85 + 0.0004 * i);
  s.inner = r1_only();
  const SweepResult r = sweep(s);
  double crossing = 0.0;
  for (const SweepPoint& p : r.points) {
    if (p.result.best_value > p.mzi * (1 + 1e-9)) {
      crossing = p.axis_value;
      break;
    }
  }
  EXPECT_NEAR(crossing, 0.8708, 1e-3);
}

TEST(Sweep, MandelPlateauBelowHalf) {
  SweepSpec s;
  s.base.family = Family::mandel;
  s.n_phi = 0.1;
  s.axis = "eta";
  s.values = {0.1, 0.25, 0.4};
  s.inner = r1_only();
  s.inner.optimize_r2 = true;
  const SweepResult r = sweep(s);
  for (const SweepPoint& p : r.points) {
    EXPECT_EQ(p.status, "ok");
    EXPECT_NEAR(p.result.best_value, 0.2, 0.01 * 0.2 / p.axis_value) << p.axis_value;
    EXPECT_GT(p.result.best_value, p.mzi);
  }
}

TEST(Sweep, SeriesProducesOneCurvePerValue) {
  SweepSpec s;
  s.n_phi = 0.1;
  s.mode = SweepMode::fixed;
  s.axis = "eta";
  s.values = {0.5, 1.0};
  s.series = "r2";
  s.series_values = {0.5, 1.0, 1.5};
  s.base.r1 = 0.2;
  const SweepResult r = sweep(s);
  EXPECT_EQ(r.points.size(), 6u);
  std::ostringstream out;
  write_csv(r, out);
  EXPECT_EQ(out.str().substr(0, 6), "r2,eta");
}

#include "gaussqfi/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include "gaussqfi/analytic.hpp"

namespace gaussqfi {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio

struct Counted {
  const Objective& f;
  const std::string& name;
  int evaluations = 0;

  double operator()(double x) {
    const double v = f(x);
    ++evaluations;
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "objective is not finite at " << name << "=" << x;
      throw NumericalError(msg.str());
    }
    return v;
  }
};

// Golden-section maximization on [a, b]; returns (x, f(x)).
std::pair<double, double> golden(Counted& f, double a, double b, double tol, bool* converged) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int iter = 0;
  while (b - a > tol && iter < 200) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++iter;
  }
  *converged = b - a <= tol;
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

bool ties(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

bool rounding_tie(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

OptimizationResult maximize_bounded(const Objective& f, double lo, double hi, const std::string& name, double tol,
                                    int grid) {
  if (!(hi >= lo)) throw std::invalid_argument("maximize_bounded: empty interval for " + name);
  Counted eval{f, name};
  OptimizationResult r;
  if (hi - lo <= tol) {
    r.best_value = eval(lo);
    r.best_params[name] = lo;
    r.converged = true;
    r.evaluations = eval.evaluations;
    return r;
  }
  grid = std::max(grid, 2);
  std::vector<double> xs(grid + 1);
  std::vector<double> vs(grid + 1);
  for (int k = 0; k <= grid; ++k) {
    xs[k] = k == grid ? hi : lo + (hi - lo) * k / grid;
    vs[k] = eval(xs[k]);
  }
  const int k = static_cast<int>(std::max_element(vs.begin(), vs.end()) - vs.begin());
  const double a = xs[std::max(k - 1, 0)];
  const double b = xs[std::min(k + 1, grid)];
  bool converged = false;
  auto [xm, vm] = golden(eval, a, b, tol, &converged);

  // Endpoints first: the optimum frequently sits on a bound, and a flat
  // interior must not displace it.
  double best_x = vs[0] >= vs[grid] ? lo : hi;
  double best_v = std::max(vs[0], vs[grid]);
  if (vs[k] > best_v && !rounding_tie(vs[k], best_v)) {
    best_x = xs[k];
    best_v = vs[k];
  }
  // Rounding-level gains do not move the optimum off a grid point or bound.
  if (vm > best_v && !rounding_tie(vm, best_v)) {
    best_x = xm;
    best_v = vm;
  }
  r.best_value = best_v;
  r.best_params[name] = best_x;
  r.converged = converged;
  r.evaluations = eval.evaluations;
  return r;
}

OptimizationResult optimize_r1(const Objective& objective, double n_phi, double tol) {
  return maximize_bounded(objective, 0.0, r1_max(n_phi), "r1", tol);
}

OptimizationResult optimize_phase(const Objective& objective, double tol, int grid) {
  const std::string name = "varphi";
  Counted eval{objective, name};
  const double period = 2.0 * std::numbers::pi;
  std::vector<double> vs(grid);
  for (int k = 0; k < grid; ++k) vs[k] = eval(period * k / grid);
  const double vmax = *std::max_element(vs.begin(), vs.end());
  const double vmin = *std::min_element(vs.begin(), vs.end());

  OptimizationResult r;
  if (ties(vmin, vmax)) {
    r.best_value = vmax;
    r.best_params[name] = 0.0;
    r.degenerate = true;
    r.converged = true;
    r.optima = {0.0};
    r.evaluations = eval.evaluations;
    return r;
  }

  // Grid-local maxima, best first; only the leading few are refined.
  std::vector<int> peaks;
  for (int k = 0; k < grid; ++k) {
    const double left = vs[(k + grid - 1) % grid];
    const double right = vs[(k + 1) % grid];
    if (vs[k] >= left && vs[k] >= right && (vs[k] > left || vs[k] > right)) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vs[a] > vs[b]; });
  if (peaks.size() > 8) peaks.resize(8);

  const double step = period / grid;
  std::vector<std::pair<double, double>> refined;
  bool all_converged = true;
  for (int k : peaks) {
    bool conv = false;
    auto [x, v] = golden(eval, period * k / grid - step, period * k / grid + step, tol, &conv);
    all_converged = all_converged && conv;
    x = std::fmod(x, period);
    if (x < 0.0) x += period;
    refined.emplace_back(x, v);
    // The grid point stays a candidate: the refinement never revisits it, and
    // at a removable singularity it can be the only point reaching the limit.
    refined.emplace_back(period * k / grid, vs[k]);
  }
  double best = vmax;
  for (const auto& [x, v] : refined) best = std::max(best, v);
  // Best candidates first, so a refined point and its own grid point collapse
  // onto whichever of the two is higher.
  std::sort(refined.begin(), refined.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [x, v] : refined) {
    if (!ties(v, best)) continue;
    const bool seen = std::any_of(r.optima.begin(), r.optima.end(), [&](double o) {
      const double d = std::abs(o - x);
      return std::min(d, period - d) <= step;
    });
    if (!seen) r.optima.push_back(x);
  }
  std::sort(r.optima.begin(), r.optima.end());
  r.best_value = best;
  r.best_params[name] = r.optima.empty() ? 0.0 : r.optima.front();
  r.converged = all_converged;
  r.evaluations = eval.evaluations;
  return r;
}

std::string to_string(Evaluator e) {
  switch (e) {
    case Evaluator::numeric:
      return "numeric";
    case Evaluator::analytic:
      return "analytic";
    case Evaluator::automatic:
      return "auto";
  }
  return "unknown";
}

Evaluator parse_evaluator(const std::string& name) {
  if (name == "numeric") return Evaluator::numeric;
  if (name == "analytic") return Evaluator::analytic;
  if (name == "auto") return Evaluator::automatic;
  throw std::invalid_argument("unknown evaluator '" + name + "' (expected numeric, analytic or auto)");
}

std::optional<FormulaMatch> matching_formula(const ScenarioConfig& c) {
  const double n = n_phi(c);
  if (c.family == Family::mzi) return FormulaMatch{"mzi", analytic::qfi_mzi(c.T, c.eta, n)};
  if (c.family == Family::mandel && c.discard_a) {
    // Dropping mode a loses information even without external loss, so the
    // internal-loss form does not apply here.
    if (c.T == 1.0) return FormulaMatch{"mandel_no_a", analytic::qfi_mandel_no_a(c.eta, n, c.r1, c.r2)};
    return std::nullopt;
  }
  if (c.eta == 1.0) return FormulaMatch{"internal_loss", analytic::qfi_internal(c.T, n, c.r1)};
  if (c.T == 1.0) {
    if (c.family == Family::yurke) {
      return FormulaMatch{"yurke_external", analytic::qfi_yurke_external(c.eta, n, c.r1, c.r2, c.phi + c.theta)};
    }
    return FormulaMatch{"mandel_full", analytic::qfi_mandel_full(c.eta, n, c.r1, c.r2)};
  }
  return std::nullopt;
}

double scenario_qfi(const ScenarioConfig& c, Evaluator evaluator) {
  if (evaluator != Evaluator::numeric) {
    if (const auto m = matching_formula(c)) return m->value;
    if (evaluator == Evaluator::analytic) {
      throw RouteNotApplicable("no closed form covers this loss configuration");
    }
  }
  return qfi(state_derivative(build(c), c.phi)).value;
}

OptimizationResult optimize_scenario(const ScenarioConfig& base, double n, const InnerSpec& inner) {
  const bool nonlinear = base.family != Family::mzi;
  // Only the Yurke scheme with external loss depends on varphi.
  const bool phase_matters = base.family == Family::yurke && base.eta < 1.0;
  const double varphi0 = base.phi + base.theta;
  int evaluations = 0;

  auto configure = [&](double r1, double r2, double varphi) {
    ScenarioConfig c = with_dose(base, n, r1);
    if (nonlinear) {
      c.r2 = r2;
      c.theta = varphi - c.phi;
    }
    return c;
  };
  auto value = [&](double r1, double r2, double varphi) {
    ++evaluations;
    return scenario_qfi(configure(r1, r2, varphi), inner.evaluator);
  };

  // Returns the best value over varphi and records its argmax.
  auto over_phase = [&](double r1, double r2, double* varphi, std::vector<double>* optima) {
    if (!(inner.optimize_varphi && phase_matters)) {
      *varphi = varphi0;
      if (optima) *optima = {varphi0};
      return value(r1, r2, varphi0);
    }
    const OptimizationResult res = optimize_phase([&](double vp) { return value(r1, r2, vp); }, inner.tol);
    *varphi = res.best_params.at("varphi");
    if (optima) *optima = res.optima;
    return res.best_value;
  };

  auto over_r2 = [&](double r1, double* r2, double* varphi, std::vector<double>* optima) {
    if (!nonlinear) {
      *r2 = 0.0;
      return over_phase(r1, 0.0, varphi, optima);
    }
    if (inner.tie_r2_to_r1) {
      *r2 = r1;
      return over_phase(r1, r1, varphi, optima);
    }
    if (!inner.optimize_r2) {
      *r2 = base.r2;
      return over_phase(r1, base.r2, varphi, optima);
    }
    double vp = 0.0;
    const OptimizationResult res = maximize_bounded(
        [&](double r2) { return over_phase(r1, r2, &vp, nullptr); }, 0.0, inner.r2_cap, "r2", inner.tol);
    *r2 = res.best_params.at("r2");
    return over_phase(r1, *r2, varphi, optima);
  };

  double r1 = base.r1;
  bool converged = true;
  if (nonlinear && inner.r1_at_max) {
    r1 = r1_max(n);
  } else if (nonlinear && inner.optimize_r1) {
    double r2 = 0.0;
    double vp = 0.0;
    const OptimizationResult res =
        optimize_r1([&](double x) { return over_r2(x, &r2, &vp, nullptr); }, n, inner.tol);
    r1 = res.best_params.at("r1");
    converged = res.converged;
  } else if (!nonlinear) {
    r1 = 0.0;
  }

  OptimizationResult out;
  double r2 = 0.0;
  double varphi = 0.0;
  out.best_value = over_r2(r1, &r2, &varphi, &out.optima);
  const ScenarioConfig best = configure(r1, r2, varphi);
  out.best_params = {{"r1", best.r1},
                     {"r2", best.r2},
                     {"varphi", best.phi + best.theta},
                     {"alpha_sq", std::norm(best.alpha)}};
  out.converged = converged;
  out.evaluations = evaluations;
  return out;
}

double t_critical_numeric(double n, Evaluator evaluator, double tol) {
  ScenarioConfig base;
  base.family = Family::yurke;
  InnerSpec inner;
  inner.optimize_r1 = true;
  inner.evaluator = evaluator;
  // r1 grows like sqrt(T - T_C) past the threshold, so a 1e-3 departure
  // criterion moves the located T by far less than tol.
  auto departed = [&](double t) {
    base.T = t;
    return optimize_scenario(base, n, inner).best_params.at("r1") > 1e-3;
  };
  double lo = 0.5;
  double hi = 1.0;
  if (departed(lo) || !departed(hi)) {
    throw NumericalError("t_critical_numeric: optimal r1 does not switch on inside [0.5, 1]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (departed(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::optimal_qfi:
      return "optimal_qfi";
    case SweepMode::fixed:
      return "fixed";
    case SweepMode::t_critical:
      return "t_critical";
  }
  return "unknown";
}

SweepMode parse_sweep_mode(const std::string& name) {
  if (name == "optimal_qfi") return SweepMode::optimal_qfi;
  if (name == "fixed") return SweepMode::fixed;
  if (name == "t_critical") return SweepMode::t_critical;
  throw std::invalid_argument("unknown sweep mode '" + name + "' (expected optimal_qfi, fixed or t_critical)");
}

void set_parameter(ScenarioConfig& c, std::optional<double>& n, const std::string& name, double v) {
  if (name == "n_phi") n = v;
  else if (name == "r1") c.r1 = v;
  else if (name == "r2") c.r2 = v;
  else if (name == "theta") c.theta = v;
  else if (name == "phi") c.phi = v;
  else if (name == "varphi") c.theta = v - c.phi;
  else if (name == "T") c.T = v;
  else if (name == "eta") c.eta = v;
  else if (name == "alpha") c.alpha = {v, 0.0};
  else if (name == "beta") c.beta = {v, 0.0};
  else if (name == "gamma") c.gamma = {v, 0.0};
  else throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

namespace {

void check_range(const std::string& name, const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep range for '" + name + "' is empty");
  if (values.size() < 2) return;
  const bool up = values[1] > values[0];
  for (size_t i = 1; i < values.size(); ++i) {
    if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
      throw std::invalid_argument("sweep range for '" + name + "' is not strictly monotone");
    }
  }
}

SweepPoint run_point(const SweepSpec& spec, double series_value, double axis_value) {
  SweepPoint p;
  p.axis_value = axis_value;
  p.series_value = series_value;
  ScenarioConfig c = spec.base;
  std::optional<double> n = spec.n_phi;
  try {
    if (!spec.series.empty()) set_parameter(c, n, spec.series, series_value);
    set_parameter(c, n, spec.axis, axis_value);

    if (spec.mode == SweepMode::t_critical) {
      if (!n) throw std::invalid_argument("t_critical sweeps need n_phi");
      p.n_phi = *n;
      p.t_critical_formula = analytic::t_critical(*n);
      p.t_critical_numeric = t_critical_numeric(*n, spec.inner.evaluator);
      return p;
    }

    if (spec.mode == SweepMode::fixed) {
      if (n) {
        c = with_dose(c, *n, spec.inner.r1_at_max ? r1_max(*n) : c.r1);
      }
      if (spec.inner.tie_r2_to_r1) c.r2 = c.r1;
      p.result.best_value = scenario_qfi(c, spec.inner.evaluator);
      p.result.best_params = {{"r1", c.r1}, {"r2", c.r2}, {"varphi", c.phi + c.theta}, {"alpha_sq", std::norm(c.alpha)}};
      p.result.converged = true;
      p.result.evaluations = 1;
    } else {
      if (!n) throw std::invalid_argument("optimal_qfi sweeps need n_phi");
      p.result = optimize_scenario(c, *n, spec.inner);
    }
    p.n_phi = n ? *n : n_phi(c);
    p.snl = 4.0 * p.n_phi;
    p.mzi = 4.0 * c.T * c.eta * p.n_phi;

    if (spec.compare_family) {
      ScenarioConfig other = c;
      other.family = *spec.compare_family;
      if (other.family != Family::mandel) {
        other.gamma = {0.0, 0.0};
        other.discard_a = false;
      }
      const auto& bp = p.result.best_params;
      if (other.family == Family::mzi) {
        other.r1 = other.r2 = 0.0;
        p.compare_qfi = scenario_qfi(with_dose(other, p.n_phi, 0.0), spec.inner.evaluator);
      } else {
        InnerSpec fixed = spec.inner;
        fixed.optimize_r1 = fixed.optimize_r2 = fixed.tie_r2_to_r1 = fixed.r1_at_max = false;
        fixed.optimize_varphi = true;
        other.r1 = bp.at("r1");
        other.r2 = bp.at("r2");
        p.compare_qfi = optimize_scenario(other, p.n_phi, fixed).best_value;
      }
    }
  } catch (const InfeasibleScenario& e) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "infeasible (r1_max=" << e.r1_max() << ")";
    p.status = msg.str();
  } catch (const std::exception& e) {
    p.status = std::string("error: ") + e.what();
  }
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  {
    ScenarioConfig probe = spec.base;
    std::optional<double> n;
    set_parameter(probe, n, spec.axis, 0.0);
    if (!spec.series.empty()) set_parameter(probe, n, spec.series, 0.0);
  }
  check_range(spec.axis, spec.values);
  std::vector<double> series = spec.series_values;
  if (spec.series.empty()) series = {0.0};
  else check_range(spec.series, series);
  if (spec.mode == SweepMode::t_critical && spec.axis != "n_phi") {
    throw std::invalid_argument("t_critical sweeps run along n_phi");
  }

  SweepResult out;
  out.spec = spec;
  const size_t total = series.size() * spec.values.size();
  out.points.resize(total);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < total; i = next++) {
      out.points[i] = run_point(spec, series[i / spec.values.size()], spec.values[i % spec.values.size()]);
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

void write_csv(const SweepResult& r, std::ostream& out) {
  const SweepSpec& s = r.spec;
  const bool series = !s.series.empty();
  if (s.mode == SweepMode::t_critical) {
    out << "n_phi,t_critical_formula,t_critical_numeric,status\n";
    for (const auto& p : r.points) {
      out << fmt(p.axis_value) << ',' << fmt(p.t_critical_formula) << ',' << fmt(p.t_critical_numeric) << ','
          << csv_field(p.status) << '\n';
    }
    return;
  }
  if (series) out << s.series << ',';
  out << s.axis << ",r1_opt,r2_opt,varphi_opt,alpha_sq,qfi,snl,mzi";
  if (s.compare_family) out << ",qfi_" << to_string(*s.compare_family);
  out << ",status\n";
  for (const auto& p : r.points) {
    if (series) out << fmt(p.series_value) << ',';
    out << fmt(p.axis_value);
    if (p.status == "ok") {
      const auto& bp = p.result.best_params;
      out << ',' << fmt(bp.at("r1")) << ',' << fmt(bp.at("r2")) << ',' << fmt(bp.at("varphi")) << ','
          << fmt(bp.at("alpha_sq")) << ',' << fmt(p.result.best_value) << ',' << fmt(p.snl) << ',' << fmt(p.mzi);
      if (s.compare_family) out << ',' << fmt(p.compare_qfi);
    } else {
      out << ",,,,,,,";
      if (s.compare_family) out << ',';
    }
    out << ',' << csv_field(p.status) << '\n';
  }
}

}  // namespace gaussqfi

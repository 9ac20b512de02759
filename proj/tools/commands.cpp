#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "gaussqfi/qfi.hpp"
#include "run_spec.hpp"

namespace gaussqfi::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Applies the dose target, if any, by reseeding mode a.
ScenarioConfig resolved_scenario(const RunSpec& spec) {
  if (!spec.n_phi) return spec.scenario;
  const double r1 = spec.inner.r1_at_max ? r1_max(*spec.n_phi) : spec.scenario.r1;
  return with_dose(spec.scenario, *spec.n_phi, r1);
}

struct RouteRow {
  std::string name;
  std::optional<double> value;
  std::string note;
};

int run_qfi(const RunSpec& spec, std::ostream& out, std::ostream* csv) {
  const ScenarioConfig c = resolved_scenario(spec);
  const StateDerivativePair pair = state_derivative(build(c), c.phi);
  std::vector<RouteRow> rows;
  auto attempt = [&](const std::string& name, auto&& route) {
    try {
      const FisherResult r = route(pair);
      std::string note;
      if (r.regularization_used) note = "nu-regularized";
      rows.push_back({name, r.value, note});
    } catch (const RouteNotApplicable& e) {
      rows.push_back({name, std::nullopt, std::string("n/a: ") + e.what()});
    }
  };
  attempt("pure", qfi_pure);
  attempt("two_mode", qfi_two_mode);
  attempt("eigendecomp", qfi_eigendecomp);
  attempt("vectorized_oracle", qfi_vectorized);

  const std::optional<FormulaMatch> formula = matching_formula(c);
  if (formula) rows.push_back({"analytic:" + formula->name, formula->value, ""});
  const double reference = formula ? formula->value : rows[2].value.value();

  const double n = n_phi(c);
  out << "family " << to_string(c.family) << "  n_phi " << fmt(n) << "  r1 " << fmt(c.r1) << "  r2 " << fmt(c.r2)
      << "  T " << fmt(c.T) << "  eta " << fmt(c.eta) << "  varphi " << fmt(c.phi + c.theta) << '\n';
  out << "snl " << fmt(4.0 * n) << "  mzi " << fmt(4.0 * c.T * c.eta * n) << '\n';
  out << "reference: " << (formula ? "closed form " + formula->name : std::string("eigendecomp (no closed form)"))
      << '\n';
  out << std::left << std::setw(26) << "route" << std::setw(22) << "qfi" << std::setw(14) << "abs_delta"
      << std::setw(14) << "rel_delta" << "note\n";
  if (csv) *csv << "route,qfi,abs_delta,rel_delta,note\n";
  for (const RouteRow& r : rows) {
    out << std::setw(26) << r.name;
    if (r.value) {
      const double d = std::abs(*r.value - reference);
      const double rel = d / std::max(std::abs(reference), 1e-300);
      char ds[32], rs[32];
      std::snprintf(ds, sizeof ds, "%.3e", d);
      std::snprintf(rs, sizeof rs, "%.3e", rel);
      out << std::setw(22) << fmt(*r.value) << std::setw(14) << ds << std::setw(14) << rs << r.note << '\n';
      if (csv) *csv << r.name << ',' << fmt(*r.value) << ',' << fmt(d) << ',' << fmt(rel) << ',' << r.note << '\n';
    } else {
      out << std::setw(22) << "-" << std::setw(14) << "-" << std::setw(14) << "-" << r.note << '\n';
      if (csv) *csv << r.name << ",,,,\"" << r.note << "\"\n";
    }
  }
  return kOk;
}

int run_optimize(const RunSpec& spec, std::ostream& out, std::ostream* csv) {
  const double n = *spec.n_phi;
  const OptimizationResult r = optimize_scenario(spec.scenario, n, spec.inner);
  const double mzi = 4.0 * spec.scenario.T * spec.scenario.eta * n;
  out << "family " << to_string(spec.scenario.family) << "  n_phi " << fmt(n) << "  T " << fmt(spec.scenario.T)
      << "  eta " << fmt(spec.scenario.eta) << '\n';
  out << "qfi " << fmt(r.best_value) << "  snl " << fmt(4.0 * n) << "  mzi " << fmt(mzi) << '\n';
  for (const auto& [k, v] : r.best_params) out << k << ' ' << fmt(v) << '\n';
  if (r.optima.size() > 1) {
    out << "tied varphi optima:";
    for (double v : r.optima) out << ' ' << fmt(v);
    out << '\n';
  }
  if (r.degenerate) out << "objective is flat in varphi\n";
  out << "evaluations " << r.evaluations << (r.converged ? "" : "  (not converged)") << '\n';
  if (csv) {
    *csv << "key,value\nqfi," << fmt(r.best_value) << "\nsnl," << fmt(4.0 * n) << "\nmzi," << fmt(mzi) << '\n';
    for (const auto& [k, v] : r.best_params) *csv << k << ',' << fmt(v) << '\n';
  }
  return kOk;
}

int run_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err, std::ostream* csv) {
  SweepSpec s;
  s.base = spec.scenario;
  s.n_phi = spec.n_phi;
  s.axis = spec.axis;
  s.values = spec.values;
  s.series = spec.series;
  s.series_values = spec.series_values;
  s.mode = spec.mode;
  s.inner = spec.inner;
  s.compare_family = spec.compare_family;
  s.jobs = spec.jobs;
  const SweepResult r = sweep(s);
  write_csv(r, csv ? *csv : out);
  int failed = 0;
  for (const SweepPoint& p : r.points) {
    if (p.status.rfind("error", 0) == 0) {
      ++failed;
      err << "point " << s.axis << '=' << fmt(p.axis_value) << ": " << p.status << '\n';
    }
  }
  return failed ? kNumericalFailure : kOk;
}

int run_cfi(const RunSpec& spec, std::ostream& out, std::ostream& err, std::ostream* csv) {
  const ScenarioConfig base = resolved_scenario(spec);
  const CfiOptions& o = spec.cfi;
  if (base.family != Family::mandel && o.detect != "all") {
    err << "cfi: detect must be 'all' for the " << to_string(base.family) << " scheme\n";
    return kUsageError;
  }
  std::vector<double> phis = o.phi;
  if (phis.empty()) {
    for (int i = 0; i <= 64; ++i) phis.push_back(2.0 * std::numbers::pi * i / 64);
  }
  const bool no_a = o.detect != "all";
  const bool all = o.detect != "no_a";

  ScenarioConfig without_a = base;
  without_a.discard_a = true;
  ScenarioConfig with_a = base;
  with_a.discard_a = false;
  ScenarioConfig ideal = with_a;
  ideal.eta = 1.0;

  const double n = n_phi(base);
  struct Row {
    CfiResult no_a, all;
    double q_no_a = 0.0, q_all = 0.0, q_ideal = 0.0;
    std::string error;
  };
  std::vector<Row> rows(phis.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < phis.size(); i = next++) {
      Row& row = rows[i];
      try {
        auto at = [&](ScenarioConfig c) {
          c.phi = phis[i];
          return c;
        };
        if (no_a) {
          row.no_a = cfi(at(without_a), o.cutoff, o.step, o.readout);
          row.q_no_a = scenario_qfi(at(without_a), Evaluator::automatic);
        }
        if (all) {
          row.all = cfi(at(with_a), o.cutoff, o.step, o.readout);
          row.q_all = scenario_qfi(at(with_a), Evaluator::automatic);
        }
        row.q_ideal = scenario_qfi(at(ideal), Evaluator::automatic);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(spec.jobs, static_cast<int>(phis.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostream& sink = csv ? *csv : out;
  sink << "phi,ic_no_a,ic_all,qfi_no_a,qfi_all,qfi_eta1,mzi,snl,truncation_no_a,truncation_all,bound_no_a,bound_all,"
          "status\n";
  int failed = 0;
  auto cell = [](bool on, double v) { return on ? fmt(v) : std::string(); };
  for (size_t i = 0; i < phis.size(); ++i) {
    const Row& r = rows[i];
    sink << fmt(phis[i]);
    if (!r.error.empty()) {
      ++failed;
      err << "phi=" << fmt(phis[i]) << ": " << r.error << '\n';
      sink << ",,,,,,,,,,,,\"error: " << r.error << "\"\n";
      continue;
    }
    sink << ',' << cell(no_a, r.no_a.value) << ',' << cell(all, r.all.value) << ',' << cell(no_a, r.q_no_a) << ','
         << cell(all, r.q_all) << ',' << fmt(r.q_ideal) << ',' << fmt(4.0 * base.T * base.eta * n) << ','
         << fmt(4.0 * n) << ',' << cell(no_a, r.no_a.truncation_mass) << ',' << cell(all, r.all.truncation_mass)
         << ',' << cell(no_a, r.no_a.truncation_bound) << ',' << cell(all, r.all.truncation_bound) << ",ok\n";
  }
  return failed ? kNumericalFailure : kOk;
}

int run_verify(const RunSpec& spec, std::ostream& out, std::ostream* csv) {
  const std::vector<VerifyLine> lines = verify_suite(spec.verify);
  int failures = 0;
  out << std::left << std::setw(18) << "formula" << std::setw(8) << "points" << std::setw(10) << "failures"
      << "worst_rel\n";
  if (csv) *csv << "formula,points,failures,worst_rel,worst_at\n";
  for (const VerifyLine& l : lines) {
    char w[32];
    std::snprintf(w, sizeof w, "%.3e", l.worst_rel);
    out << std::setw(18) << l.formula << std::setw(8) << l.points << std::setw(10) << l.failures << w << '\n';
    if (l.failures) out << "  worst at " << l.worst_at << '\n';
    if (csv) *csv << l.formula << ',' << l.points << ',' << l.failures << ',' << fmt(l.worst_rel) << ",\"" << l.worst_at << "\"\n";
    failures += l.failures;
  }
  out << (failures ? "FAILED" : "all formulas agree") << " (tolerance " << fmt(spec.verify.tolerance) << ")\n";
  return failures ? kVerificationFailed : kOk;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* csv = nullptr;
  if (!spec.output.empty()) {
    file.open(spec.output);
    if (!file) {
      err << "error: cannot write output file " << spec.output << '\n';
      return kUsageError;
    }
    csv = &file;
  }
  try {
    switch (spec.command) {
      case Command::qfi: return run_qfi(spec, out, csv);
      case Command::optimize: return run_optimize(spec, out, csv);
      case Command::sweep: return run_sweep(spec, out, err, csv);
      case Command::cfi: return run_cfi(spec, out, err, csv);
      case Command::verify: return run_verify(spec, out, csv);
    }
  } catch (const InfeasibleScenario& e) {
    // The message already names the feasible bound r1_max.
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const RouteNotApplicable& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace gaussqfi::cli

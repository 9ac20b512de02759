#include "run_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace gaussqfi::cli {

std::string to_string(Command c) {
  switch (c) {
    case Command::qfi: return "qfi";
    case Command::cfi: return "cfi";
    case Command::optimize: return "optimize";
    case Command::sweep: return "sweep";
    case Command::verify: return "verify";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  if (name == "qfi") return Command::qfi;
  if (name == "cfi") return Command::cfi;
  if (name == "optimize") return Command::optimize;
  if (name == "sweep") return Command::sweep;
  if (name == "verify") return Command::verify;
  throw std::invalid_argument("unknown command '" + name + "' (expected qfi, cfi, optimize, sweep or verify)");
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) msg << ':' << m.line + 1 << ':' << m.column + 1;
    msg << ": " << field << ": " << what;
    throw ConfigError(msg.str());
  }

  void only_keys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, where, "expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (!ok.count(key)) {
        std::string list;
        for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
        fail(kv.first, where.empty() ? key : where + "." + key, "unknown key (allowed: " + list + ")");
      }
    }
  }

  double real(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    const std::string text = n.Scalar();
    try {
      size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail(n, field, "expected a number, got '" + text + "'");
    }
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    const double v = real(n, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, field, "expected an integer");
    return static_cast<int>(v);
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected true or false");
    const std::string t = n.Scalar();
    if (t == "true" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "no" || t == "off") return false;
    fail(n, field, "expected true or false, got '" + t + "'");
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  // A plain number is a real amplitude; [re, im] gives a complex one.
  Complex amplitude(const YAML::Node& n, const std::string& field) const {
    if (n.IsScalar()) return {real(n, field), 0.0};
    if (n.IsSequence() && n.size() == 2) return {real(n[0], field + "[0]"), real(n[1], field + "[1]")};
    fail(n, field, "expected a number or [re, im]");
  }

  // Either an explicit list or {start, stop, count}.
  std::vector<double> range(const YAML::Node& n, const std::string& field) const {
    std::vector<double> v;
    if (n.IsSequence()) {
      for (size_t i = 0; i < n.size(); ++i) v.push_back(real(n[i], field + "[" + std::to_string(i) + "]"));
    } else if (n.IsMap()) {
      only_keys(n, field, {"start", "stop", "count"});
      if (!n["start"] || !n["stop"] || !n["count"]) fail(n, field, "range needs start, stop and count");
      const double a = real(n["start"], field + ".start");
      const double b = real(n["stop"], field + ".stop");
      const int count = integer(n["count"], field + ".count");
      if (count < 1) fail(n["count"], field + ".count", "must be at least 1");
      if (count == 1) return {a};
      if (a == b) fail(n, field, "start and stop coincide");
      for (int i = 0; i < count; ++i) v.push_back(i + 1 == count ? b : a + (b - a) * i / (count - 1));
    } else {
      fail(n, field, "expected a list or {start, stop, count}");
    }
    if (v.empty()) fail(n, field, "range is empty");
    for (size_t i = 2; i < v.size(); ++i) {
      if ((v[1] > v[0]) != (v[i] > v[i - 1]) || v[i] == v[i - 1]) fail(n, field, "range is not strictly monotone");
    }
    if (v.size() == 2 && v[0] == v[1]) fail(n, field, "range is not strictly monotone");
    return v;
  }

 private:
  std::string source_;
};

void read_scenario(const Reader& rd, const YAML::Node& s, RunSpec& spec) {
  rd.only_keys(s, "scenario",
               {"family", "alpha", "beta", "gamma", "r1", "r2", "theta", "T", "eta", "phi", "discard_a", "n_phi"});
  ScenarioConfig& c = spec.scenario;
  if (s["family"]) {
    try {
      c.family = parse_family(rd.text(s["family"], "scenario.family"));
    } catch (const std::invalid_argument& e) {
      rd.fail(s["family"], "scenario.family", e.what());
    }
  }
  if (s["alpha"]) c.alpha = rd.amplitude(s["alpha"], "scenario.alpha");
  if (s["beta"]) c.beta = rd.amplitude(s["beta"], "scenario.beta");
  if (s["gamma"]) c.gamma = rd.amplitude(s["gamma"], "scenario.gamma");
  if (s["r1"]) c.r1 = rd.real(s["r1"], "scenario.r1");
  if (s["r2"]) c.r2 = rd.real(s["r2"], "scenario.r2");
  if (s["theta"]) c.theta = rd.real(s["theta"], "scenario.theta");
  if (s["T"]) c.T = rd.real(s["T"], "scenario.T");
  if (s["eta"]) c.eta = rd.real(s["eta"], "scenario.eta");
  if (s["phi"]) c.phi = rd.real(s["phi"], "scenario.phi");
  if (s["discard_a"]) c.discard_a = rd.boolean(s["discard_a"], "scenario.discard_a");
  if (s["n_phi"]) {
    spec.n_phi = rd.real(s["n_phi"], "scenario.n_phi");
    if (*spec.n_phi < 0.0) rd.fail(s["n_phi"], "scenario.n_phi", "must be >= 0");
  }
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    rd.fail(s, "scenario", e.what());
  }
}

void read_optimize(const Reader& rd, const YAML::Node& o, InnerSpec& in) {
  rd.only_keys(o, "optimize", {"r1", "r2", "varphi", "r1_at_max", "tie_r2_to_r1", "r2_cap", "tol", "evaluator"});
  if (o["r1"]) in.optimize_r1 = rd.boolean(o["r1"], "optimize.r1");
  if (o["r2"]) in.optimize_r2 = rd.boolean(o["r2"], "optimize.r2");
  if (o["varphi"]) in.optimize_varphi = rd.boolean(o["varphi"], "optimize.varphi");
  if (o["r1_at_max"]) in.r1_at_max = rd.boolean(o["r1_at_max"], "optimize.r1_at_max");
  if (o["tie_r2_to_r1"]) in.tie_r2_to_r1 = rd.boolean(o["tie_r2_to_r1"], "optimize.tie_r2_to_r1");
  if (o["r2_cap"]) {
    in.r2_cap = rd.real(o["r2_cap"], "optimize.r2_cap");
    if (!(in.r2_cap > 0.0)) rd.fail(o["r2_cap"], "optimize.r2_cap", "must be positive");
  }
  if (o["tol"]) {
    in.tol = rd.real(o["tol"], "optimize.tol");
    if (!(in.tol > 0.0)) rd.fail(o["tol"], "optimize.tol", "must be positive");
  }
  if (o["evaluator"]) {
    try {
      in.evaluator = parse_evaluator(rd.text(o["evaluator"], "optimize.evaluator"));
    } catch (const std::invalid_argument& e) {
      rd.fail(o["evaluator"], "optimize.evaluator", e.what());
    }
  }
  if (in.optimize_r1 && in.r1_at_max) rd.fail(o, "optimize", "r1 and r1_at_max are mutually exclusive");
  if (in.optimize_r2 && in.tie_r2_to_r1) rd.fail(o, "optimize", "r2 and tie_r2_to_r1 are mutually exclusive");
}

void read_sweep(const Reader& rd, const YAML::Node& w, RunSpec& spec) {
  rd.only_keys(w, "sweep", {"axis", "values", "series", "series_values", "mode", "compare_family"});
  if (!w["axis"] || !w["values"]) rd.fail(w, "sweep", "needs axis and values");
  spec.axis = rd.text(w["axis"], "sweep.axis");
  spec.values = rd.range(w["values"], "sweep.values");
  if (w["series"]) {
    spec.series = rd.text(w["series"], "sweep.series");
    if (!w["series_values"]) rd.fail(w, "sweep.series_values", "required when series is set");
    spec.series_values = rd.range(w["series_values"], "sweep.series_values");
  } else if (w["series_values"]) {
    rd.fail(w["series_values"], "sweep.series_values", "given without sweep.series");
  }
  ScenarioConfig probe = spec.scenario;
  std::optional<double> n;
  for (const auto& [key, name] : {std::pair{"axis", spec.axis}, std::pair{"series", spec.series}}) {
    if (name.empty()) continue;
    try {
      set_parameter(probe, n, name, 0.0);
    } catch (const std::invalid_argument& e) {
      rd.fail(w[key], std::string("sweep.") + key, e.what());
    }
  }
  if (w["mode"]) {
    try {
      spec.mode = parse_sweep_mode(rd.text(w["mode"], "sweep.mode"));
    } catch (const std::invalid_argument& e) {
      rd.fail(w["mode"], "sweep.mode", e.what());
    }
  }
  if (w["compare_family"]) {
    try {
      spec.compare_family = parse_family(rd.text(w["compare_family"], "sweep.compare_family"));
    } catch (const std::invalid_argument& e) {
      rd.fail(w["compare_family"], "sweep.compare_family", e.what());
    }
  }
}

void read_cfi(const Reader& rd, const YAML::Node& f, CfiOptions& cfi) {
  rd.only_keys(f, "cfi", {"cutoff", "step", "readout", "detect", "phi"});
  if (f["cutoff"]) {
    cfi.cutoff = rd.integer(f["cutoff"], "cfi.cutoff");
    if (cfi.cutoff < 1 || cfi.cutoff > kMaxCutoff) {
      rd.fail(f["cutoff"], "cfi.cutoff", "must lie in [1, " + std::to_string(kMaxCutoff) + "]");
    }
  }
  if (f["step"]) {
    cfi.step = rd.real(f["step"], "cfi.step");
    if (!(cfi.step > 0.0)) rd.fail(f["step"], "cfi.step", "must be positive");
  }
  if (f["readout"]) {
    const std::string r = rd.text(f["readout"], "cfi.readout");
    if (r == "truncated") cfi.readout = Readout::truncated;
    else if (r == "saturating") cfi.readout = Readout::saturating;
    else rd.fail(f["readout"], "cfi.readout", "expected truncated or saturating");
  }
  if (f["detect"]) {
    cfi.detect = rd.text(f["detect"], "cfi.detect");
    if (cfi.detect != "both" && cfi.detect != "no_a" && cfi.detect != "all") {
      rd.fail(f["detect"], "cfi.detect", "expected both, no_a or all");
    }
  }
  if (f["phi"]) cfi.phi = rd.range(f["phi"], "cfi.phi");
}

void read_verify(const Reader& rd, const YAML::Node& v, VerifyOptions& opt) {
  rd.only_keys(v, "verify", {"points", "seed", "tolerance"});
  if (v["points"]) {
    opt.points = rd.integer(v["points"], "verify.points");
    if (opt.points < 1) rd.fail(v["points"], "verify.points", "must be positive");
  }
  if (v["seed"]) opt.seed = static_cast<unsigned>(rd.integer(v["seed"], "verify.seed"));
  if (v["tolerance"]) {
    opt.tolerance = rd.real(v["tolerance"], "verify.tolerance");
    if (!(opt.tolerance > 0.0)) rd.fail(v["tolerance"], "verify.tolerance", "must be positive");
  }
}

}  // namespace

RunSpec parse_run_spec(const std::string& text, const std::string& source_name) {
  const Reader rd(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream msg;
    msg << source_name << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(msg.str());
  }
  RunSpec spec;
  if (!root || root.IsNull()) return spec;
  rd.only_keys(root, "", {"command", "scenario", "optimize", "sweep", "cfi", "verify", "output", "jobs"});
  if (root["command"]) {
    try {
      spec.command = parse_command(rd.text(root["command"], "command"));
    } catch (const std::invalid_argument& e) {
      rd.fail(root["command"], "command", e.what());
    }
  }
  if (root["scenario"]) read_scenario(rd, root["scenario"], spec);
  if (root["optimize"]) read_optimize(rd, root["optimize"], spec.inner);
  if (root["sweep"]) read_sweep(rd, root["sweep"], spec);
  if (root["cfi"]) read_cfi(rd, root["cfi"], spec.cfi);
  if (root["verify"]) read_verify(rd, root["verify"], spec.verify);
  if (root["output"]) spec.output = rd.text(root["output"], "output");
  if (root["jobs"]) {
    spec.jobs = rd.integer(root["jobs"], "jobs");
    if (spec.jobs < 1) rd.fail(root["jobs"], "jobs", "must be at least 1");
  }
  if (spec.command == Command::sweep && spec.axis.empty()) rd.fail(root, "sweep", "a sweep run needs a sweep section");
  if (spec.command == Command::optimize && !spec.n_phi) {
    rd.fail(root, "scenario.n_phi", "an optimize run needs the photon dose");
  }
  return spec;
}

RunSpec load_run_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_spec(buf.str(), path);
}

}  // namespace gaussqfi::cli

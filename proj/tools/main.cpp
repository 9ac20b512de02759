#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "run_spec.hpp"

#ifndef GAUSSQFI_FIGURES_DIR
#define GAUSSQFI_FIGURES_DIR "figures"
#endif

namespace fs = std::filesystem;
using namespace gaussqfi::cli;

namespace {

fs::path figures_dir() {
  if (const char* env = std::getenv("GAUSSQFI_FIGURES")) return env;
  return GAUSSQFI_FIGURES_DIR;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QFI and photon-counting Fisher information of seeded, lossy interferometers"};
  std::string command;
  std::string config;
  std::string out;
  std::string figure;
  int cutoff = 0;
  double r2_cap = 0.0;
  int jobs = 0;
  app.add_option("command", command, "qfi, cfi, optimize, sweep or verify (default: the config's command)");
  app.add_option("--config", config, "run spec (YAML)");
  app.add_option("--out", out, "output CSV path (overrides the config)");
  app.add_option("--cutoff", cutoff, "photon-number cutoff per detector for cfi")->check(CLI::Range(1, gaussqfi::kMaxCutoff));
  app.add_option("--r2-cap", r2_cap, "upper bound for r2 in optimizations")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "worker threads for sweeps and cfi grids")->check(CLI::PositiveNumber);
  app.add_option("--seed-figures", figure, "load the spec of a figure from the figures directory by id");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (!config.empty() && !figure.empty()) {
    std::cerr << "error: --config and --seed-figures are mutually exclusive\n";
    return kUsageError;
  }
  if (!figure.empty()) {
    config = (figures_dir() / (figure + ".yaml")).string();
    if (!fs::exists(config)) {
      std::cerr << "error: no figure spec '" << figure << "' in " << figures_dir() << '\n';
      return kUsageError;
    }
  }

  if (config.empty() && command.empty()) {
    std::cerr << app.help();
    return kUsageError;
  }

  RunSpec spec;
  try {
    if (!config.empty()) spec = load_run_spec(config);
    if (!command.empty()) spec.command = parse_command(command);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  if (config.empty() && spec.command != Command::verify) {
    std::cerr << "error: the " << to_string(spec.command) << " command needs --config or --seed-figures\n";
    return kUsageError;
  }
  if (spec.command == Command::sweep && spec.axis.empty()) {
    std::cerr << "error: the sweep command needs a sweep section in the config\n";
    return kUsageError;
  }
  if (spec.command == Command::optimize && !spec.n_phi) {
    std::cerr << "error: the optimize command needs scenario.n_phi\n";
    return kUsageError;
  }
  if (!out.empty()) spec.output = out;
  if (cutoff) spec.cfi.cutoff = cutoff;
  if (r2_cap > 0.0) spec.inner.r2_cap = r2_cap;
  if (jobs) spec.jobs = jobs;
  return run(spec, std::cout, std::cerr);
}

// vibq: coherence, mode correlation and entanglement sweeps for vibrating
// trapped-ion qubits in single-mode cavities.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
// 3 resource limit exceeded.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vibq/errors.hpp"
#include "vibq/scenario.hpp"
#include "vibq/verification.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

// Flag overrides in the order they should be applied; later flags win.
struct Overrides {
  std::vector<std::pair<std::string, std::optional<std::string>*>> slots;
  std::map<std::string, std::optional<std::string>> values;

  void add(CLI::App* app, const std::string& flag, const std::string& help) {
    auto& slot = values[flag];
    app->add_option("--" + flag, slot, help);
    slots.emplace_back(flag, &slot);
  }

  void apply(vibq::Scenario& s) const {
    for (const auto& [flag, slot] : slots) {
      if (*slot) vibq::apply_setting(s, flag, **slot, 0);
    }
  }
};

int run_command(const std::optional<std::string>& config, const std::optional<std::string>& section,
                const Overrides& overrides, bool stationary) {
  std::vector<vibq::Scenario> scenarios =
      config ? vibq::load_config(*config) : std::vector<vibq::Scenario>{vibq::Scenario{}};
  if (section) {
    std::erase_if(scenarios, [&](const vibq::Scenario& s) { return s.name != *section; });
    if (scenarios.empty()) throw vibq::ConfigError(0, "section", "no section named '" + *section + "'");
  }
  for (vibq::Scenario& s : scenarios) {
    overrides.apply(s);
    if (stationary) s.stationary = true;
    for (const std::string& w : s.params.validate()) std::cerr << "warning: " << s.name << ": " << w << '\n';
    const vibq::ResultTable table = vibq::run_scenario(s);
    if (s.out.empty()) {
      vibq::write_csv(std::cout, table);
    } else {
      std::ofstream out(s.out);
      if (!out) throw vibq::ConfigError(0, "out", "cannot write '" + s.out + "'");
      vibq::write_csv(out, table);
      std::cerr << s.name << ": wrote " << table.rows.size() << " rows to " << s.out << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibrating trapped-ion qubit dynamics: time sweeps, oracle verification and plot scripts"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Evaluate a scenario on its time grid and write CSV");
  std::optional<std::string> config, section;
  bool stationary = false;
  run->add_option("--config", config, "Scenario file (key=value lines, [section] per scenario)");
  run->add_option("--section", section, "Only run this section of the config file");
  run->add_flag("--stationary", stationary, "Use the stationary-qubit (Jaynes-Cummings) baseline");
  Overrides overrides;
  overrides.add(run, "mode", "single-coherence | single-coherence-excited | mode-correlation | concurrence | tqc");
  overrides.add(run, "alpha-sq", "Mean phonon number |alpha|^2");
  overrides.add(run, "beta-sq", "Mean photon number |beta|^2");
  overrides.add(run, "eta", "Lamb-Dicke parameter");
  overrides.add(run, "kappa", "Qubit-cavity coupling");
  overrides.add(run, "stationary-coupling", "Coupling of the stationary baseline (default kappa)");
  overrides.add(run, "ce", "Excited amplitude RE,IM");
  overrides.add(run, "cg", "Ground amplitude RE,IM");
  overrides.add(run, "bell", "Bell-like state: phi or psi");
  overrides.add(run, "mu", "Real Bell amplitude mu; upsilon = sqrt(1 - mu^2)");
  overrides.add(run, "t-max", "Final time (raw units)");
  overrides.add(run, "steps", "Number of time samples (>= 2)");
  overrides.add(run, "tail-tol", "Fock truncation tail tolerance");
  overrides.add(run, "out", "Output CSV path (default stdout)");
  overrides.add(run, "workers", "Worker threads (default $VIBQ_WORKERS or hardware)");

  CLI::App* verify = app.add_subcommand("verify", "Run the oracle-equivalence and invariant suite");
  vibq::verification::Profile profile;
  verify->add_option("--tail-tol", profile.tail_tol, "Fock truncation tail tolerance");
  verify->add_option("--workers", profile.workers, "Worker threads");

  CLI::App* plot = app.add_subcommand("plot-script", "Write a gnuplot script for a result CSV");
  std::string csv_path;
  std::optional<std::string> plot_mode, plot_out;
  plot->add_option("csv", csv_path, "CSV written by `vibq run`")->required();
  plot->add_option("--mode", plot_mode, "Override the mode recorded in the CSV");
  plot->add_option("--out", plot_out, "Script path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(config, section, overrides, stationary);
    if (*verify) {
      const auto results = vibq::verification::run_suite(
          profile, [](const auto& r) { std::cout << vibq::verification::format_check(r) << std::endl; });
      std::size_t failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::cout << (results.size() - failed) << '/' << results.size() << " checks passed\n";
      return failed == 0 ? 0 : kExitFailure;
    }
    if (*plot) {
      const std::string script = vibq::emit_plot_script(csv_path, plot_mode);
      if (plot_out) {
        std::ofstream out(*plot_out);
        if (!out) throw vibq::ConfigError(0, "out", "cannot write '" + *plot_out + "'");
        out << script;
      } else {
        std::cout << script;
      }
      return 0;
    }
  } catch (const vibq::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vibq::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vibq::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  }
  return 0;
}

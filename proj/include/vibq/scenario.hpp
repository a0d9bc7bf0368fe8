#pragma once

// Scenario configuration, time-sweep driver, CSV output and plot-script
// generation behind the vibq command-line tool.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vibq/composite.hpp"
#include "vibq/single_dynamics.hpp"

namespace vibq {

enum class ScenarioMode { single_coherence, single_coherence_excited, mode_correlation, concurrence, tqc };

/// Invalid configuration. line is 0 for command-line flags.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message)
      : std::runtime_error(format(line, field, message)), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& message) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    if (!field.empty()) where += field + ": ";
    return where + message;
  }
  int line_;
  std::string field_;
};

struct Scenario {
  std::string name{"default"};
  ScenarioMode mode{ScenarioMode::single_coherence};
  bool stationary{false};
  std::optional<QubitAmplitudes<double>> qubit;  // unset: mode default
  BellSpec<double> bell;
  ModeParams<double> params;
  double alpha_sq{1};
  double beta_sq{1};
  double t_max{5000};
  int n_steps{5001};
  double tail_tol{1e-12};
  std::string out;  // empty: stdout
  int workers{0};   // 0: environment / hardware default

  /// Qubit preparation actually used: explicit amplitudes, else |e> for the
  /// excited-coherence mode, else (|e> + |g>)/sqrt(2).
  QubitAmplitudes<double> initial_qubit() const;
  double time_at(int i) const { return t_max * double(i) / double(n_steps - 1); }
  /// Dimensionless time: eta kappa t when vibrating, kappa t when stationary.
  double scaled_time(double t) const { return stationary ? params.kappa * t : params.sideband_rate() * t; }
};

std::string mode_name(ScenarioMode mode, bool stationary = false);
/// Parses names like "concurrence" or "stationary-tqc"; returns {mode, stationary}.
std::pair<ScenarioMode, bool> parse_mode(const std::string& text);

/// Applies one key=value setting. Keys match the long flag names with or
/// without dashes, e.g. "alpha-sq" and "alpha_sq".
void apply_setting(Scenario& s, const std::string& key, const std::string& value, int line = 0);

/// Parses a flat key=value file. Settings before the first [section] apply to
/// every section; each section yields one scenario. A file without sections
/// yields a single scenario named "default".
std::vector<Scenario> parse_config(std::istream& in, const Scenario& base = {});
std::vector<Scenario> load_config(const std::string& path, const Scenario& base = {});

/// Throws ConfigError when the scenario violates a precondition.
void validate(const Scenario& s);

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Default ceiling on the coefficient grids held by one worker.
inline constexpr std::size_t kGridMemoryBudget = std::size_t(2) << 30;

/// Evaluates the scenario on its time grid; row i is t_i = i t_max / (n_steps - 1).
/// Throws ConfigError for invalid scenarios and ResourceError when the
/// truncated grids exceed the memory budget.
ResultTable run_scenario(const Scenario& s, std::size_t memory_budget = kGridMemoryBudget);

/// Fixed scientific notation with 9 significant digits; undefined values as "nan".
std::string format_number(double value);
void write_csv(std::ostream& out, const ResultTable& table);

/// Standalone gnuplot script for a CSV produced by run_scenario. The mode is
/// read from the CSV metadata unless given. Throws ConfigError on a missing
/// or malformed CSV.
std::string emit_plot_script(const std::string& csv_path, std::optional<std::string> mode = std::nullopt);

}  // namespace vibq

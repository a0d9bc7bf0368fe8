#include <algorithm>
#include <fstream>
#include <sstream>

#include "vibq/scenario.hpp"

namespace vibq {
namespace {

std::vector<std::string> split_header(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string col;
  while (std::getline(ss, col, ',')) {
    col.erase(std::remove_if(col.begin(), col.end(), [](unsigned char c) { return std::isspace(c); }), col.end());
    cols.push_back(col);
  }
  return cols;
}

int column_index(const std::vector<std::string>& cols, const std::string& name) {
  const auto it = std::find(cols.begin(), cols.end(), name);
  return it == cols.end() ? -1 : static_cast<int>(it - cols.begin()) + 1;  // gnuplot columns are 1-based
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::string emit_plot_script(const std::string& csv_path, std::optional<std::string> mode_text) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError(0, "csv", "cannot open '" + csv_path + "'");

  std::string line, header, meta_mode;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.substr(0, eq) == "# mode") meta_mode = line.substr(eq + 1);
      continue;
    }
    header = line;
    break;
  }
  if (header.empty()) throw ConfigError(0, "csv", "'" + csv_path + "' has no header row");
  const std::vector<std::string> cols = split_header(header);

  std::string mode_str = mode_text.value_or(meta_mode);
  if (mode_str.empty()) {
    if (column_index(cols, "zeta") > 0) mode_str = "single-coherence";
    else if (column_index(cols, "cross_corr") > 0) mode_str = "mode-correlation";
    else throw ConfigError(0, "csv", "cannot infer the mode; pass --mode");
  }
  const auto [mode, stationary_mode] = parse_mode(mode_str);

  const int x_col = std::max(column_index(cols, "eta_kappa_t"), column_index(cols, "kappa_t"));
  if (column_index(cols, "t") != 1 || x_col != 2) throw ConfigError(0, "csv", "unexpected time columns in header");
  const bool stationary_axis = column_index(cols, "kappa_t") == 2;

  std::string y_name, y_label;
  bool unit_range = true;
  switch (mode) {
    case ScenarioMode::single_coherence:
    case ScenarioMode::single_coherence_excited:
      y_name = "zeta";
      y_label = "coherence {/Symbol z}";
      break;
    case ScenarioMode::mode_correlation:
      y_name = "cross_corr";
      y_label = "C(t)";
      unit_range = false;
      break;
    case ScenarioMode::concurrence:
      y_name = "value";
      y_label = "concurrence";
      break;
    case ScenarioMode::tqc:
      y_name = "value";
      y_label = "two-qubit coherence";
      break;
  }
  const int y_col = column_index(cols, y_name);
  if (y_col < 0) throw ConfigError(0, "csv", "header lacks column '" + y_name + "' required by mode " + mode_str);

  std::ostringstream gp;
  gp << "# gnuplot script generated by vibq plot-script (" << mode_name(mode, stationary_mode) << ")\n"
     << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key off\n"
     << "set xlabel " << quoted(stationary_axis ? "{/Symbol k}t" : "{/Symbol h}{/Symbol k}t") << "\n"
     << "set ylabel " << quoted(y_label) << "\n";
  if (unit_range) gp << "set yrange [0:1]\n";
  else gp << "set xzeroaxis\n";
  gp << "plot " << quoted(csv_path) << " using " << x_col << ':' << y_col << " every ::1 with lines lw 1.5\n";
  return gp.str();
}

}  // namespace vibq

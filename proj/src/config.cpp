#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "vibq/scenario.hpp"

namespace vibq {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_real(const std::string& text, int line, const std::string& field) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, field, "expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw ConfigError(line, field, "expected a finite number, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text, int line, const std::string& field) {
  const double v = parse_real(text, line, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(line, field, "expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text, int line, const std::string& field) {
  const std::string v = lower(text);
  if (v == "1" || v == "true" || v == "yes" || v == "on" || v.empty()) return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(line, field, "expected a boolean, got '" + text + "'");
}

// "RE,IM" or a bare real part.
std::complex<double> parse_complex(const std::string& text, int line, const std::string& field) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_real(trim(text), line, field), 0.0};
  return {parse_real(trim(text.substr(0, comma)), line, field), parse_real(trim(text.substr(comma + 1)), line, field)};
}

}  // namespace

QubitAmplitudes<double> Scenario::initial_qubit() const {
  if (qubit) return *qubit;
  if (mode == ScenarioMode::single_coherence_excited) return {1.0, 0.0};
  const double h = 1.0 / std::sqrt(2.0);
  return {h, h};
}

std::string mode_name(ScenarioMode mode, bool stationary) {
  std::string base;
  switch (mode) {
    case ScenarioMode::single_coherence: base = "single-coherence"; break;
    case ScenarioMode::single_coherence_excited: base = "single-coherence-excited"; break;
    case ScenarioMode::mode_correlation: base = "mode-correlation"; break;
    case ScenarioMode::concurrence: base = "concurrence"; break;
    case ScenarioMode::tqc: base = "tqc"; break;
  }
  return stationary ? "stationary-" + base : base;
}

std::pair<ScenarioMode, bool> parse_mode(const std::string& text) {
  std::string name = lower(trim(text));
  bool stationary = false;
  if (name.rfind("stationary-", 0) == 0) {
    stationary = true;
    name = name.substr(11);
  }
  for (ScenarioMode m : {ScenarioMode::single_coherence, ScenarioMode::single_coherence_excited,
                         ScenarioMode::mode_correlation, ScenarioMode::concurrence, ScenarioMode::tqc}) {
    if (name == mode_name(m)) return {m, stationary};
  }
  throw ConfigError(0, "mode", "unknown mode '" + text + "'");
}

void apply_setting(Scenario& s, const std::string& raw_key, const std::string& raw_value, int line) {
  std::string key = lower(trim(raw_key));
  std::replace(key.begin(), key.end(), '_', '-');
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  const std::string value = trim(raw_value);

  auto real = [&] { return parse_real(value, line, key); };
  if (key == "mode") {
    try {
      const auto [mode, stationary] = parse_mode(value);
      s.mode = mode;
      if (stationary) s.stationary = true;
    } catch (const ConfigError& e) {
      throw ConfigError(line, key, "unknown mode '" + value + "'");
    }
  } else if (key == "stationary") {
    s.stationary = parse_bool(value, line, key);
  } else if (key == "alpha-sq") {
    s.alpha_sq = real();
  } else if (key == "beta-sq") {
    s.beta_sq = real();
  } else if (key == "eta") {
    s.params.eta = real();
  } else if (key == "kappa") {
    s.params.kappa = real();
  } else if (key == "omega0") {
    s.params.omega0 = real();
  } else if (key == "omega") {
    s.params.omega = real();
  } else if (key == "omega-v") {
    s.params.omega_v = real();
  } else if (key == "stationary-coupling") {
    s.params.stationary_coupling = real();
  } else if (key == "ce" || key == "cg") {
    QubitAmplitudes<double> q = s.qubit.value_or(QubitAmplitudes<double>{0.0, 0.0});
    (key == "ce" ? q.c_e : q.c_g) = parse_complex(value, line, key);
    s.qubit = q;
  } else if (key == "bell") {
    const std::string v = lower(value);
    if (v == "phi") {
      s.bell.kind = BellKind::phi;
    } else if (v == "psi") {
      s.bell.kind = BellKind::psi;
    } else {
      throw ConfigError(line, key, "expected phi or psi, got '" + value + "'");
    }
  } else if (key == "mu") {
    const double mu = real();
    if (std::abs(mu) > 1.0) throw ConfigError(line, key, "|mu| must not exceed 1");
    s.bell.mu = mu;
    s.bell.upsilon = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  } else if (key == "t-max") {
    s.t_max = real();
  } else if (key == "steps") {
    s.n_steps = parse_int(value, line, key);
  } else if (key == "tail-tol") {
    s.tail_tol = real();
  } else if (key == "out") {
    s.out = value;
  } else if (key == "workers") {
    s.workers = parse_int(value, line, key);
  } else {
    throw ConfigError(line, key, "unknown setting");
  }
}

std::vector<Scenario> parse_config(std::istream& in, const Scenario& base) {
  Scenario common = base;
  std::vector<Scenario> sections;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string line = trim(text);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError(line_no, "", "malformed section header");
      sections.push_back(common);
      sections.back().name = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, trim(line), "expected key=value");
    Scenario& target = sections.empty() ? common : sections.back();
    apply_setting(target, line.substr(0, eq), line.substr(eq + 1), line_no);
  }
  if (sections.empty()) sections.push_back(common);
  return sections;
}

std::vector<Scenario> load_config(const std::string& path, const Scenario& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "config", "cannot open '" + path + "'");
  return parse_config(in, base);
}

void validate(const Scenario& s) {
  if (s.n_steps < 2) throw ConfigError(0, "steps", "must be at least 2");
  if (!(s.t_max > 0)) throw ConfigError(0, "t-max", "must be positive");
  if (!(s.tail_tol > 0 && s.tail_tol < 1)) throw ConfigError(0, "tail-tol", "must lie in (0, 1)");
  if (s.alpha_sq < 0) throw ConfigError(0, "alpha-sq", "must be non-negative");
  if (s.beta_sq < 0) throw ConfigError(0, "beta-sq", "must be non-negative");
  if (s.workers < 0) throw ConfigError(0, "workers", "must be non-negative");
  if (s.stationary && s.mode == ScenarioMode::mode_correlation) {
    throw ConfigError(0, "mode", "mode-correlation needs the vibrational mode; it has no stationary variant");
  }
  try {
    s.params.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(0, "params", e.what());
  }
  if (s.qubit) {
    const double norm = std::norm(s.qubit->c_e) + std::norm(s.qubit->c_g);
    if (std::abs(norm - 1.0) > 1e-6) throw ConfigError(0, "ce/cg", "qubit amplitudes are not normalized");
  }
  if (std::abs(std::norm(s.bell.mu) + std::norm(s.bell.upsilon) - 1.0) > 1e-12) {
    throw ConfigError(0, "mu", "Bell amplitudes are not normalized");
  }
}

}  // namespace vibq

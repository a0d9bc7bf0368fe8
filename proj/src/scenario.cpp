#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "vibq/composite.hpp"
#include "vibq/errors.hpp"
#include "vibq/fock.hpp"
#include "vibq/observables.hpp"
#include "vibq/scenario.hpp"
#include "vibq/single_dynamics.hpp"
#include "vibq/worker_pool.hpp"

namespace vibq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string complex_text(std::complex<double> z) { return format_number(z.real()) + "," + format_number(z.imag()); }

QubitAmplitudes<double> normalized_qubit(const Scenario& s) {
  QubitAmplitudes<double> q = s.initial_qubit();
  const double norm = std::sqrt(std::norm(q.c_e) + std::norm(q.c_g));
  return QubitAmplitudes<double>::make(q.c_e / norm, q.c_g / norm);
}

std::vector<std::string> columns_for(const Scenario& s) {
  std::vector<std::string> cols{"t", s.stationary ? "kappa_t" : "eta_kappa_t"};
  switch (s.mode) {
    case ScenarioMode::single_coherence:
    case ScenarioMode::single_coherence_excited:
      cols.emplace_back("zeta");
      break;
    case ScenarioMode::mode_correlation:
      for (const char* c : {"n_a", "n_b", "joint", "cross_corr", "g2"}) cols.emplace_back(c);
      break;
    case ScenarioMode::concurrence:
    case ScenarioMode::tqc:
      cols.emplace_back("value");
      break;
  }
  return cols;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

ResultTable run_scenario(const Scenario& s, std::size_t memory_budget) {
  validate(s);
  const QubitAmplitudes<double> qubit = normalized_qubit(s);
  const QubitMotion motion = s.stationary ? QubitMotion::stationary : QubitMotion::vibrating;

  const auto wa = coherent_amplitudes_for_tolerance(std::sqrt(s.alpha_sq), s.tail_tol);
  const auto wb = coherent_amplitudes_for_tolerance(std::sqrt(s.beta_sq), s.tail_tol);
  // Six complex grids live at once per worker (four coefficient grids, two branches).
  const std::size_t cells = std::size_t(s.stationary ? 1 : wa.n_max + 2) * std::size_t(wb.n_max + 2);
  const int workers = s.workers > 0 ? s.workers : default_worker_count();
  const std::size_t required = cells * 6 * sizeof(std::complex<double>) * std::size_t(workers);
  if (required > memory_budget) throw ResourceError("run_scenario: truncated grids too large", required);

  ModeParams<double> params = s.params;
  params.alpha_mag = wa.magnitude;
  params.beta_mag = wb.magnitude;
  const TwoQubitDensity<double> rho0 = bell_state(s.bell);

  ResultTable table;
  table.columns = columns_for(s);
  table.rows.resize(static_cast<std::size_t>(s.n_steps));

  parallel_for_index(table.rows.size(), workers, [&](std::size_t i) {
    const double t = s.time_at(static_cast<int>(i));
    std::vector<double>& row = table.rows[i];
    row = {t, s.scaled_time(t)};
    switch (s.mode) {
      case ScenarioMode::single_coherence:
      case ScenarioMode::single_coherence_excited: {
        const GlobalState<double> state =
            s.stationary ? stationary_evolve(qubit, params, wb, t) : evolve_state(qubit, params, wa, wb, t);
        row.push_back(l1_coherence(reduced_qubit_density(state)));
        break;
      }
      case ScenarioMode::mode_correlation: {
        const auto m = mode_moments(evolve_state(qubit, params, wa, wb, t));
        row.insert(row.end(), {m.n_a_mean, m.n_b_mean, m.joint_mean, m.cross_corr, m.g2.value_or(kNaN)});
        break;
      }
      case ScenarioMode::concurrence:
      case ScenarioMode::tqc: {
        const ProcessMatrix<double> map = single_qubit_map(params, wa, wb, t, motion);
        const TwoQubitDensity<double> rho = evolve_two_qubit(rho0, map, map);
        row.push_back(s.mode == ScenarioMode::concurrence ? concurrence(rho, truncated_trace_tolerance(wa, wb))
                                                           : two_qubit_coherence(rho));
        break;
      }
    }
  });

  auto& md = table.metadata;
  md.emplace_back("scenario", s.name);
  md.emplace_back("mode", mode_name(s.mode, s.stationary));
  md.emplace_back("eta", format_number(s.params.eta));
  md.emplace_back("kappa", format_number(s.params.kappa));
  md.emplace_back("stationary_coupling", format_number(s.params.stationary_rate()));
  md.emplace_back("alpha_sq", format_number(s.alpha_sq));
  md.emplace_back("beta_sq", format_number(s.beta_sq));
  md.emplace_back("ce", complex_text(qubit.c_e));
  md.emplace_back("cg", complex_text(qubit.c_g));
  md.emplace_back("bell", s.bell.kind == BellKind::phi ? "phi" : "psi");
  md.emplace_back("mu", complex_text(s.bell.mu));
  md.emplace_back("upsilon", complex_text(s.bell.upsilon));
  md.emplace_back("t_max", format_number(s.t_max));
  md.emplace_back("steps", std::to_string(s.n_steps));
  md.emplace_back("tail_tol", format_number(s.tail_tol));
  md.emplace_back("n_max_a", std::to_string(s.stationary ? 0 : wa.n_max));
  md.emplace_back("n_max_b", std::to_string(wb.n_max));
  md.emplace_back("tail_mass_a", format_number(s.stationary ? 0.0 : wa.tail_mass));
  md.emplace_back("tail_mass_b", format_number(wb.tail_mass));
  if (s.params.omega0 > 0) md.emplace_back("omega0", format_number(s.params.omega0));
  if (s.params.omega > 0) md.emplace_back("omega", format_number(s.params.omega));
  if (s.params.omega_v > 0) md.emplace_back("omega_v", format_number(s.params.omega_v));
  return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  for (const auto& [key, value] : table.metadata) out << "# " << key << '=' << value << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

}  // namespace vibq

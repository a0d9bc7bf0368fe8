#include "vibq/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include "vibq/composite.hpp"
#include "vibq/envelope.hpp"
#include "vibq/fock.hpp"
#include "vibq/observables.hpp"
#include "vibq/oracle.hpp"
#include "vibq/single_dynamics.hpp"
#include "vibq/worker_pool.hpp"

namespace vibq::verification {
namespace {

using Params = ModeParams<double>;
using Amplitudes = CoherentAmplitudes<double>;
using Qubit = QubitAmplitudes<double>;

constexpr double kEta = 0.02;
constexpr double kKappa = 1.0;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Params params_for(double alpha_sq, double beta_sq) {
  Params p;
  p.eta = kEta;
  p.kappa = kKappa;
  p.alpha_mag = std::sqrt(alpha_sq);
  p.beta_mag = std::sqrt(beta_sq);
  return p;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return v;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string list(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + (std::isinf(xs[i]) ? std::string("inf") : number(xs[i]));
  return s + "]";
}

CheckResult check(std::string name, double measured, const std::string& relation, double bound,
                  std::string detail = {}) {
  bool ok = false;
  if (relation == "<=") ok = measured <= bound;
  else if (relation == ">=") ok = measured >= bound;
  else if (relation == "<") ok = measured < bound;
  else if (relation == ">") ok = measured > bound;
  return {std::move(name), measured, relation, bound, ok && !std::isnan(measured), std::move(detail)};
}

// Worst-case density deviations accumulated over every sampled point.
class DensityLedger {
 public:
  template <typename Derived>
  void record(const Eigen::MatrixBase<Derived>& rho) {
    const auto d = diagnose_density(rho);
    std::lock_guard lock(mutex_);
    hermiticity_ = std::max(hermiticity_, d.hermiticity_error);
    trace_ = std::max(trace_, d.trace_error);
    min_eigen_ = std::min(min_eigen_, d.min_eigenvalue);
    ++count_;
  }
  double hermiticity() const { return hermiticity_; }
  double trace() const { return trace_; }
  double min_eigen() const { return min_eigen_; }
  long count() const { return count_; }

 private:
  std::mutex mutex_;
  double hermiticity_{0}, trace_{0}, min_eigen_{kInf};
  long count_{0};
};

// Max over a, b of |x - y| where x = y + error.
template <typename A, typename B>
double max_entry_diff(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double trace_distance(const Matrix4c<double>& a, const Matrix4c<double>& b) {
  const Matrix4c<double> diff = a - b;
  const Matrix4c<double> herm = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix4c<double>> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

struct OracleEquivalence {
  double worst_infidelity{0};
  double worst_norm_error{0};
  double worst_propagator_gap{0};
};

// Criterion: analytic evolve_state against brute-force propagation.
OracleEquivalence oracle_equivalence(const Profile& profile, DensityLedger& ledger, int workers) {
  const std::vector<double> intensities{0, 1, 3, 5};
  const std::vector<double> times = linspace(0.0, 50.0 / (kEta * kKappa), 64);
  struct Config {
    double alpha_sq, beta_sq, c_e;
  };
  std::vector<Config> configs;
  for (double a : intensities)
    for (double b : intensities)
      for (double ce : {1.0, kInvSqrt2}) configs.push_back({a, b, ce});

  OracleEquivalence out;
  std::mutex mutex;
  parallel_for_index(configs.size(), workers, [&](std::size_t k) {
    const Config& c = configs[k];
    const Params p = params_for(c.alpha_sq, c.beta_sq);
    const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, profile.tail_tol);
    const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, profile.tail_tol);
    const Qubit q = Qubit::make(c.c_e, std::sqrt(1.0 - c.c_e * c.c_e));
    // One Fock level beyond the analytic grid so boundary leakage shows up.
    const auto h = oracle::build_red_sideband(p, wa.n_max + 1, wb.n_max + 1);
    const oracle::BlockPropagator<double> propagator(h);
    const ComplexVector<double> psi0 = oracle::product_state(h, q, p.alpha_mag, p.beta_mag);

    OracleEquivalence local;
    for (double t : times) {
      const GlobalState<double> s = evolve_state(q, p, wa, wb, t);
      const ComplexVector<double> exact = propagator.apply(psi0, t);
      local.worst_infidelity = std::max(local.worst_infidelity, 1.0 - oracle::fidelity(oracle::embed(s, h), exact));
      local.worst_norm_error = std::max(local.worst_norm_error, std::abs(s.norm_squared() - 1.0));
      ledger.record(reduced_qubit_density(s));
    }
    // The generic propagator is far slower; compare it on the last sample of
    // a subset of configurations.
    if (k % 5 == 0) {
      const double t = times.back() * 0.37;
      const ComplexVector<double> generic = oracle::evolve_exact(psi0, h, t, oracle::Propagator::taylor);
      local.worst_propagator_gap = (generic - propagator.apply(psi0, t)).cwiseAbs().maxCoeff();
    }
    std::lock_guard lock(mutex);
    out.worst_infidelity = std::max(out.worst_infidelity, local.worst_infidelity);
    out.worst_norm_error = std::max(out.worst_norm_error, local.worst_norm_error);
    out.worst_propagator_gap = std::max(out.worst_propagator_gap, local.worst_propagator_gap);
  });
  return out;
}

double uncorrected_norm_deviation() {
  const Params p = params_for(1.0, 1.0);
  const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, 1e-12);
  const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, 1e-12);
  const double t = 2.0 / p.sideband_rate();
  const GlobalState<double> s = evolve_state(Qubit{1.0, 0.0}, p, wa, wb, t, DCoefficient::uncorrected);
  return std::abs(s.norm_squared() - 1.0);
}

struct MapConsistency {
  double worst_entry{0};
  double worst_trace_defect{0};
  double min_choi{kInf};
};

MapConsistency map_consistency(const Profile& profile, DensityLedger& ledger) {
  std::mt19937_64 rng(20190611);
  std::normal_distribution<double> gauss;
  std::vector<Qubit> states;
  for (int k = 0; k < 50; ++k) {
    std::complex<double> ce(gauss(rng), gauss(rng)), cg(gauss(rng), gauss(rng));
    const double n = std::sqrt(std::norm(ce) + std::norm(cg));
    states.push_back(Qubit::make(ce / n, cg / n));
  }
  MapConsistency out;
  const std::vector<double> times = linspace(0.0, 50.0 / (kEta * kKappa), 16);
  for (auto [alpha_sq, beta_sq] : {std::pair{1.0, 1.0}, std::pair{3.0, 5.0}}) {
    const Params p = params_for(alpha_sq, beta_sq);
    const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, profile.tail_tol);
    const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, profile.tail_tol);
    for (double t : times) {
      const ProcessMatrix<double> map = single_qubit_map(p, wa, wb, t);
      out.worst_trace_defect = std::max(out.worst_trace_defect, map.trace_defect());
      out.min_choi = std::min(out.min_choi, map.min_choi_eigenvalue());
      for (const Qubit& q : states) {
        const Matrix2c<double> direct = reduced_qubit_density(evolve_state(q, p, wa, wb, t));
        const Matrix2c<double> mapped = map.apply(q.density());
        out.worst_entry = std::max(out.worst_entry, max_entry_diff(direct, mapped));
        ledger.record(mapped);
      }
    }
  }
  return out;
}

double two_qubit_validation(int workers, DensityLedger& ledger) {
  constexpr int kNMax = 12;
  const std::vector<double> times = linspace(0.0, 20.0 / (kEta * kKappa), 16);
  struct Case {
    BellKind kind;
    double intensity;
    double t;
  };
  std::vector<Case> cases;
  for (BellKind kind : {BellKind::phi, BellKind::psi})
    for (double intensity : {0.0, 1.0})
      for (double t : times) cases.push_back({kind, intensity, t});

  std::vector<double> distance(cases.size());
  parallel_for_index(cases.size(), workers, [&](std::size_t k) {
    const Case& c = cases[k];
    const Params p = params_for(c.intensity, c.intensity);
    const BellSpec<double> spec{c.kind, kInvSqrt2, kInvSqrt2};
    const Amplitudes wa = coherent_amplitudes(p.alpha_mag, kNMax);
    const Amplitudes wb = coherent_amplitudes(p.beta_mag, kNMax);
    const ProcessMatrix<double> map = single_qubit_map(p, wa, wb, c.t);
    const TwoQubitDensity<double> composite = evolve_two_qubit(bell_state(spec), map, map);
    const TwoQubitDensity<double> exact = oracle::two_subsystem_oracle(spec, p, kNMax, c.t);
    ledger.record(composite.rho);
    ledger.record(exact.rho);
    distance[k] = trace_distance(composite.rho, exact.rho);
  });
  return *std::max_element(distance.begin(), distance.end());
}

// Sampled curves for the qualitative trend checks at eta = 0.02, kappa = 1.
struct TrendCurves {
  std::vector<double> scaled_times;
  std::vector<double> coherence, concurrence_phi, concurrence_psi, tqc;
};

TrendCurves trend_curves(double alpha_sq, double beta_sq, const Profile& profile, int workers,
                         DensityLedger& ledger) {
  const Params p = params_for(alpha_sq, beta_sq);
  const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, profile.tail_tol);
  const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, profile.tail_tol);
  const Qubit plus{kInvSqrt2, kInvSqrt2};
  const TwoQubitDensity<double> phi = bell_state(BellSpec<double>{BellKind::phi, kInvSqrt2, kInvSqrt2});
  const TwoQubitDensity<double> psi = bell_state(BellSpec<double>{BellKind::psi, kInvSqrt2, kInvSqrt2});

  TrendCurves c;
  c.scaled_times = linspace(0.0, 100.0, 10001);
  const std::size_t n = c.scaled_times.size();
  c.coherence.resize(n);
  c.concurrence_phi.resize(n);
  c.concurrence_psi.resize(n);
  c.tqc.resize(n);
  parallel_for_index(n, workers, [&](std::size_t i) {
    const double t = c.scaled_times[i] / p.sideband_rate();
    const Matrix2c<double> rho = reduced_qubit_density(evolve_state(plus, p, wa, wb, t));
    c.coherence[i] = l1_coherence(rho);
    const ProcessMatrix<double> map = single_qubit_map(p, wa, wb, t);
    const TwoQubitDensity<double> rho_phi = evolve_two_qubit(phi, map, map);
    const TwoQubitDensity<double> rho_psi = evolve_two_qubit(psi, map, map);
    c.concurrence_phi[i] = concurrence(rho_phi, truncated_trace_tolerance(wa, wb));
    c.concurrence_psi[i] = concurrence(rho_psi, truncated_trace_tolerance(wa, wb));
    c.tqc[i] = two_qubit_coherence(rho_phi);
    if (i % 50 == 0) {
      ledger.record(rho);
      ledger.record(rho_phi.rho);
      ledger.record(rho_psi.rho);
    }
  });
  return c;
}

double crossing_or_inf(const std::vector<double>& t, const std::vector<double>& v, double threshold) {
  return first_envelope_crossing<double>(t, v, threshold).value_or(kInf);
}

// Largest step against the wanted direction; <= 0 means the sequence is monotone.
double worst_decrease(const std::vector<double>& xs) {
  double worst = -kInf;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double step = (std::isinf(xs[i]) && std::isinf(xs[i + 1])) ? 0.0 : xs[i] - xs[i + 1];
    worst = std::max(worst, step);
  }
  return worst;
}

double worst_increase(const std::vector<double>& xs) {
  std::vector<double> neg(xs.size());
  std::transform(xs.begin(), xs.end(), neg.begin(), [](double x) { return -x; });
  return worst_decrease(neg);
}

double min_cross_correlation(double c_e, const Profile& profile) {
  const Params p = params_for(1.0, 1.0);
  const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, profile.tail_tol);
  const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, profile.tail_tol);
  const Qubit q = Qubit::make(c_e, std::sqrt(1.0 - c_e * c_e));
  double lowest = kInf;
  for (double scaled : linspace(50.0, 100.0, 5001)) {
    const double t = scaled / p.sideband_rate();
    lowest = std::min(lowest, mode_moments(evolve_state(q, p, wa, wb, t)).cross_corr);
  }
  return lowest;
}

struct Revival {
  double peak_time{0};
  double nominal{0};
};

// Jaynes-Cummings collapse and revival of |rho_ee - 1/2| for |e> and a coherent
// field with mean photon number 25.
Revival stationary_revival(DensityLedger& ledger) {
  Params p = params_for(0.0, 25.0);
  const double g = p.stationary_rate();
  const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, 1e-12);
  Revival r;
  r.nominal = 2.0 * M_PI * std::sqrt(25.0) / g;
  const std::vector<double> times = linspace(0.0, 2.0 * r.nominal, 12567);
  std::vector<double> amplitude(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix2c<double> rho = reduced_qubit_density(stationary_evolve(Qubit{1.0, 0.0}, p, wb, times[i]));
    amplitude[i] = std::abs(rho(0, 0).real() - 0.5);
    if (i % 50 == 0) ledger.record(rho);
  }
  const std::vector<double> env = upper_envelope<double>(times, amplitude);
  // Collapse: envelope first falls below 0.1. Revival: the first later episode
  // where it climbs back above 0.1; the peak is its maximum.
  std::size_t i = 0;
  while (i < env.size() && env[i] >= 0.1) ++i;
  while (i < env.size() && env[i] < 0.1) ++i;
  std::size_t best = i;
  while (i < env.size() && env[i] >= 0.1) {
    if (env[i] > env[best]) best = i;
    ++i;
  }
  r.peak_time = best < times.size() ? times[best] : kInf;
  return r;
}

}  // namespace

std::string format_check(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured=" << number(r.measured) << ' ' << r.relation << ' '
     << number(r.bound);
  if (!r.detail.empty()) os << "  " << r.detail;
  return os.str();
}

std::vector<CheckResult> run_suite(const Profile& profile, const Reporter& report) {
  std::vector<CheckResult> results;
  auto emit = [&](CheckResult r) {
    if (report) report(r);
    results.push_back(std::move(r));
  };
  const int workers = profile.workers > 0 ? profile.workers : default_worker_count();
  const double scale = profile.truncation_scale();
  DensityLedger ledger;

  {
    const OracleEquivalence eq = oracle_equivalence(profile, ledger, workers);
    emit(check("oracle-equivalence.single-subsystem", eq.worst_infidelity, "<=", 1e-8 * scale,
               "max 1 - fidelity; |alpha|^2,|beta|^2 in {0,1,3,5}, c_e in {1, 1/sqrt2}, 64 times"));
    emit(check("norm-conservation.corrected", eq.worst_norm_error, "<=", 1e-9 * scale,
               "max |sum |E|^2 + |F|^2 - 1| over the same grid"));
    emit(check("oracle.propagator-agreement", eq.worst_propagator_gap, "<=", 1e-10,
               "block diagonalization vs Taylor propagator, max entry gap"));
  }
  emit(check("falsification.uncorrected-d", uncorrected_norm_deviation(), ">", 1e-3,
             "|norm - 1| with the uncorrected D, |alpha|^2=|beta|^2=1, eta kappa t=2"));
  {
    const MapConsistency mc = map_consistency(profile, ledger);
    emit(check("map-consistency.random-states", mc.worst_entry, "<=", 1e-9,
               "50 random pure states x 16 times, max entrywise gap"));
    emit(check("process-matrix.trace-preserving", mc.worst_trace_defect, "<=", 1e-9 * scale));
    emit(check("process-matrix.choi-positivity", mc.min_choi, ">=", -1e-8));
  }
  emit(check("two-qubit-map.oracle", two_qubit_validation(workers, ledger), "<=", 1e-6,
             "max trace distance; Bell phi/psi, |alpha|^2=|beta|^2 in {0,1}, n_max=12, 16 times"));

  {
    // Exact anchors.
    const Params p = params_for(1.0, 1.0);
    const Amplitudes wa = coherent_amplitudes_for_tolerance(p.alpha_mag, profile.tail_tol);
    const Amplitudes wb = coherent_amplitudes_for_tolerance(p.beta_mag, profile.tail_tol);
    const double zeta_plus = l1_coherence(reduced_qubit_density(evolve_state(Qubit{kInvSqrt2, kInvSqrt2}, p, wa, wb, 0.0)));
    const double zeta_excited = l1_coherence(reduced_qubit_density(evolve_state(Qubit{1.0, 0.0}, p, wa, wb, 0.0)));
    emit(check("anchor.zeta0-maximally-coherent", std::abs(zeta_plus - 1.0), "<=", 1e-9 * scale, "|zeta(0) - 1|"));
    emit(check("anchor.zeta0-excited", zeta_excited, "<=", 1e-12, "zeta(0)"));
    const TwoQubitDensity<double> bell = bell_state(BellSpec<double>{BellKind::phi, kInvSqrt2, kInvSqrt2});
    emit(check("anchor.bell-concurrence", std::abs(concurrence(bell) - 1.0), "<=", 1e-12, "|C - 1|"));
    emit(check("anchor.tqc0", std::abs(two_qubit_coherence(bell) - 1.0), "<=", 1e-12, "|TQC(0) - 1|"));
    double worst_c0 = 0;
    for (double a : {0.0, 1.0, 3.0, 5.0}) {
      for (double b : {0.0, 1.0, 3.0, 5.0}) {
        const Params pc = params_for(a, b);
        const Amplitudes wa2 = coherent_amplitudes_for_tolerance(pc.alpha_mag, profile.tail_tol);
        const Amplitudes wb2 = coherent_amplitudes_for_tolerance(pc.beta_mag, profile.tail_tol);
        for (double ce : {1.0, kInvSqrt2, 0.0}) {
          const Qubit q = Qubit::make(ce, std::sqrt(1.0 - ce * ce));
          worst_c0 = std::max(worst_c0, std::abs(mode_moments(evolve_state(q, pc, wa2, wb2, 0.0)).cross_corr));
        }
      }
    }
    emit(check("anchor.cross-correlation-at-zero", worst_c0, "<=", 1e-12, "max |C(0)| over 48 configurations"));
  }

  {
    // Qualitative trends at |alpha|^2 = 1, |beta|^2 in {1, 2, 4}.
    std::vector<double> zeta_half, extinction, tqc_half, phi_psi_gap;
    for (double beta_sq : {1.0, 2.0, 4.0}) {
      const TrendCurves c = trend_curves(1.0, beta_sq, profile, workers, ledger);
      zeta_half.push_back(crossing_or_inf(c.scaled_times, c.coherence, 0.5));
      extinction.push_back(crossing_or_inf(c.scaled_times, c.concurrence_phi, 0.01));
      tqc_half.push_back(crossing_or_inf(c.scaled_times, c.tqc, 0.5));
      double gap = 0;
      for (std::size_t i = 0; i < c.concurrence_phi.size(); ++i)
        gap = std::max(gap, std::abs(c.concurrence_phi[i] - c.concurrence_psi[i]));
      phi_psi_gap.push_back(gap);
    }
    emit(check("qualitative.a.coherence-half-time-nondecreasing", worst_decrease(zeta_half), "<=", 0.0,
               "eta kappa t at envelope < 0.5 for |beta|^2=1,2,4: " + list(zeta_half)));
    emit(check("qualitative.b.concurrence-extinction-nonincreasing", worst_increase(extinction), "<=", 0.0,
               "eta kappa t at envelope < 0.01 for |beta|^2=1,2,4: " + list(extinction)));
    emit(check("qualitative.c.tqc-half-time-nondecreasing", worst_decrease(tqc_half), "<=", 0.0,
               "eta kappa t at envelope < 0.5 for |beta|^2=1,2,4: " + list(tqc_half)));
    const double floor_plus = min_cross_correlation(kInvSqrt2, profile);
    const double floor_excited = min_cross_correlation(1.0, profile);
    emit(check("qualitative.d.permanent-correlation", floor_plus, ">", 0.0,
               "min C(t), eta kappa t in [50,100], c_e=c_g=1/sqrt2"));
    emit(check("qualitative.d.excited-not-permanent", floor_excited, "<=", 0.0,
               "min C(t), eta kappa t in [50,100], c_e=1"));
    emit(check("property.phi-psi-concurrence-agreement", *std::max_element(phi_psi_gap.begin(), phi_psi_gap.end()),
               "<=", 1e-2, "max |C_phi - C_psi| over eta kappa t in [0,100]: " + list(phi_psi_gap)));
  }

  {
    const Revival r = stationary_revival(ledger);
    emit(check("stationary.jcm-revival", std::abs(r.peak_time - r.nominal) / r.nominal, "<=", 0.15,
               "relative offset of revival peak t=" + number(r.peak_time) + " from 2 pi sqrt(25)/kappa=" +
                   number(r.nominal)));
  }

  const std::string sampled = std::to_string(ledger.count()) + " sampled densities";
  emit(check("density.hermiticity", ledger.hermiticity(), "<=", 1e-9, sampled));
  emit(check("density.trace", ledger.trace(), "<=", 1e-9 * scale, sampled));
  emit(check("density.min-eigenvalue", ledger.min_eigen(), ">=", -1e-8, sampled));
  return results;
}

}  // namespace vibq::verification

#include <cmath>
#include <random>

#include "doctest.h"
#include "vibq/fock.hpp"
#include "vibq/observables.hpp"
#include "vibq/oracle.hpp"
#include "vibq/single_dynamics.hpp"

using namespace vibq;
using cd = std::complex<double>;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ModeParams<double> params(double alpha_sq, double beta_sq) {
  ModeParams<double> p;
  p.alpha_mag = std::sqrt(alpha_sq);
  p.beta_mag = std::sqrt(beta_sq);
  return p;
}

CoherentAmplitudes<double> amps(double magnitude) { return coherent_amplitudes_for_tolerance(magnitude, 1e-12); }

}  // namespace

TEST_CASE("coefficients at t = 0 reduce to the initial weights") {
  const auto p = params(1, 2);
  const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
  for (int m = 0; m <= 6; ++m) {
    for (int n = 0; n <= 6; ++n) {
      const auto k = coefficients(m, n, 0.0, p, wa, wb);
      const double w = wa.weight(m) * wb.weight(n);
      CHECK(k.a == cd(w));
      CHECK(k.b == cd(0));
      CHECK(k.c == cd(w));
      CHECK(k.d == cd(0));
    }
  }
}

TEST_CASE("m = 0 freezes the ground branch") {
  const auto p = params(1, 1);
  const auto wa = amps(1.0), wb = amps(1.0);
  for (double t : {1.0, 37.0, 1234.5}) {
    for (int n = 0; n < 6; ++n) {
      const auto k = coefficients(0, n, t, p, wa, wb);
      CHECK(k.c == cd(wa.weight(0) * wb.weight(n)));
      CHECK(k.d == cd(0));
    }
  }
}

TEST_CASE("coefficients at (m, n) = (1, 2), eta kappa t = 0.5 match frozen matrix-exponential amplitudes") {
  // Amplitudes of |e,1,2> and |g,1,2> after exp(-iHt) from |e>|1>|1> and
  // |g>|1>|1>, computed on a 25-level truncation with a dense expm.
  const auto p = params(1, 1);
  const auto wa = amps(1.0), wb = amps(1.0);
  const double t = 0.5 / p.sideband_rate();
  const auto k = coefficients(1, 2, t, p, wa, wb);
  CHECK(std::abs(k.a - cd(0.08823246743039082, 0)) < 1e-9);
  CHECK(std::abs(k.b - cd(0, -0.09990217991403008)) < 1e-9);
  CHECK(std::abs(k.c - cd(0.19776246315760265, 0)) < 1e-9);
  CHECK(std::abs(k.d - cd(0, -0.23898807411309972)) < 1e-9);

  // The same numbers from the in-tree oracle.
  const auto h = oracle::build_red_sideband(p, wa.n_max + 1, wb.n_max + 1);
  const auto from_e = oracle::evolve_exact(oracle::product_state(h, QubitAmplitudes<double>{1, 0}, 1.0, 1.0), h, t);
  const auto from_g = oracle::evolve_exact(oracle::product_state(h, QubitAmplitudes<double>{0, 1}, 1.0, 1.0), h, t);
  CHECK(std::abs(k.a - from_e[h.index(kExcited, 1, 2)]) < 1e-9);
  CHECK(std::abs(k.d - from_e[h.index(kGround, 1, 2)]) < 1e-9);
  CHECK(std::abs(k.b - from_g[h.index(kExcited, 1, 2)]) < 1e-9);
  CHECK(std::abs(k.c - from_g[h.index(kGround, 1, 2)]) < 1e-9);
}

TEST_CASE("coefficients reject indices beyond the grid") {
  const auto p = params(1, 1);
  const auto wa = coherent_amplitudes(1.0, 6), wb = coherent_amplitudes(1.0, 8);
  CHECK_THROWS_AS(coefficients(7, 0, 1.0, p, wa, wb), ParameterError);
  CHECK_THROWS_AS(coefficients(0, 9, 1.0, p, wa, wb), ParameterError);
  CHECK_THROWS_AS(coefficients(-1, 0, 1.0, p, wa, wb), ParameterError);
  CHECK_THROWS_AS(coefficients(0, 0, -1.0, p, wa, wb), ParameterError);
}

TEST_CASE("|g,0,0> is dark") {
  const auto p = params(0, 0);
  const auto wa = amps(0.0), wb = amps(0.0);
  for (double t : {0.0, 3.0, 400.0}) {
    const auto s = evolve_state(QubitAmplitudes<double>{0, 1}, p, wa, wb, t);
    CHECK(s.g_branch(0, 0) == cd(1));
    CHECK(s.norm_squared() == doctest::Approx(1.0));
    CHECK(s.e_branch.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(s.g_branch.cwiseAbs2().sum() - 1.0) < 1e-15);
  }
}

TEST_CASE("|e,0,0> Rabi-oscillates with |g,1,1>") {
  const auto p = params(0, 0);
  const auto wa = amps(0.0), wb = amps(0.0);
  for (double theta : {0.3, 1.0, 2.5}) {
    const double t = theta / p.sideband_rate();
    const auto s = evolve_state(QubitAmplitudes<double>{1, 0}, p, wa, wb, t);
    CHECK(std::abs(s.e_branch(0, 0) - cd(std::cos(theta))) < 1e-14);
    CHECK(std::abs(s.g_branch(1, 1) - cd(0, -std::sin(theta))) < 1e-14);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-14);
    const auto rho = reduced_qubit_density(s);
    CHECK(std::abs(rho(0, 0).real() - std::cos(theta) * std::cos(theta)) < 1e-14);
  }
}

TEST_CASE("the uncorrected D coefficient breaks the norm") {
  const auto p = params(0, 0);
  const auto wa = amps(0.0), wb = amps(0.0);
  const double theta = 1.0;
  const auto s = evolve_state(QubitAmplitudes<double>{1, 0}, p, wa, wb, theta / p.sideband_rate(),
                              DCoefficient::uncorrected);
  // Only cos^2 survives: the vacuum weight w_1 w_1 = 0 kills the partner amplitude.
  CHECK(s.norm_squared() == doctest::Approx(std::cos(theta) * std::cos(theta)));
}

TEST_CASE("evolve_state agrees with the oracle for a superposed qubit") {
  const auto p = params(1, 1);
  const auto wa = amps(1.0), wb = amps(1.0);
  const QubitAmplitudes<double> q{kInvSqrt2, kInvSqrt2};
  const double t = 2.0 / p.sideband_rate();
  const auto s = evolve_state(q, p, wa, wb, t);
  const auto h = oracle::build_red_sideband(p, wa.n_max + 1, wb.n_max + 1);
  const auto exact = oracle::evolve_exact(oracle::product_state(h, q, 1.0, 1.0), h, t);
  CHECK(oracle::fidelity(oracle::embed(s, h), exact) >= 1 - 1e-8);
  CHECK(std::abs(s.norm_squared() - 1.0) <= wa.tail_mass + wb.tail_mass + 1e-10);
}

TEST_CASE("reduced density at t = 0 is the initial qubit state") {
  const auto p = params(3, 1);
  const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
  const QubitAmplitudes<double> q = QubitAmplitudes<double>::make(cd(0.6, 0.0), cd(0.0, 0.8));
  const auto rho = reduced_qubit_density(evolve_state(q, p, wa, wb, 0.0));
  CHECK((rho - q.density()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("reduced density matches an explicit oracle partial trace") {
  const auto p = params(3, 5);
  const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
  const QubitAmplitudes<double> q{kInvSqrt2, kInvSqrt2};
  const auto h = oracle::build_red_sideband(p, wa.n_max + 1, wb.n_max + 1);
  const auto psi0 = oracle::product_state(h, q, p.alpha_mag, p.beta_mag);
  for (double scaled : {0.7, 5.0, 23.0}) {
    const double t = scaled / p.sideband_rate();
    const auto rho = reduced_qubit_density(evolve_state(q, p, wa, wb, t));
    const auto exact = oracle::reduce_to_qubit(oracle::evolve_exact(psi0, h, t), h);
    CHECK((rho - exact).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("stationary baseline: vacuum Rabi oscillation and dark ground state") {
  auto p = params(0, 0);
  p.stationary_coupling = 0.7;
  const auto wb = amps(0.0);
  for (double t : {0.0, 0.4, 2.0, 9.0}) {
    const auto up = reduced_qubit_density(stationary_evolve(QubitAmplitudes<double>{1, 0}, p, wb, t));
    CHECK(std::abs(up(0, 0).real() - std::pow(std::cos(0.7 * t), 2)) < 1e-14);
    const auto down = reduced_qubit_density(stationary_evolve(QubitAmplitudes<double>{0, 1}, p, wb, t));
    CHECK(std::abs(down(1, 1).real() - 1.0) < 1e-15);
  }
}

TEST_CASE("stationary baseline agrees with a brute-force Jaynes-Cummings evolution") {
  const auto p = params(0, 9);
  const auto wb = amps(3.0);
  const auto h = oracle::build_jaynes_cummings(p.stationary_rate(), wb.n_max + 1);
  const QubitAmplitudes<double> q{kInvSqrt2, cd(0, kInvSqrt2)};
  const auto psi0 = oracle::product_state(h, q, 0.0, 3.0);
  for (double t : {0.5, 4.0, 19.0}) {
    const auto s = stationary_evolve(q, p, wb, t);
    CHECK(oracle::fidelity(oracle::embed(s, h), oracle::evolve_exact(psi0, h, t)) >= 1 - 1e-10);
  }
}

TEST_CASE("process matrix is the identity at t = 0") {
  const auto p = params(2, 3);
  const auto map = single_qubit_map(p, amps(p.alpha_mag), amps(p.beta_mag), 0.0);
  CHECK((map.matrix - Matrix4c<double>::Identity()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("process matrix on |e><e| reproduces the direct evolution") {
  const auto p = params(1, 3);
  const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
  for (double scaled : {0.5, 3.0, 17.0}) {
    const double t = scaled / p.sideband_rate();
    const auto map = single_qubit_map(p, wa, wb, t);
    const auto direct = reduced_qubit_density(evolve_state(QubitAmplitudes<double>{1, 0}, p, wa, wb, t));
    CHECK((map.apply(QubitAmplitudes<double>{1, 0}.density()) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("vacuum modes give the two-level Rabi channel") {
  // Closed form: |e><e| -> cos^2 |e><e| + sin^2 |g><g|, |e><g| -> cos |e><g|,
  // |g><g| fixed, with theta = eta kappa t.
  const auto p = params(0, 0);
  const auto wa = amps(0.0), wb = amps(0.0);
  for (double theta : {0.2, 1.1, 2.9}) {
    const auto map = single_qubit_map(p, wa, wb, theta / p.sideband_rate());
    Matrix4c<double> expected = Matrix4c<double>::Zero();
    const double c = std::cos(theta), s = std::sin(theta);
    expected(0, 0) = c * c;
    expected(3, 0) = s * s;
    expected(1, 1) = c;
    expected(2, 2) = c;
    expected(3, 3) = 1;
    CHECK((map.matrix - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("property: map consistency, trace preservation and complete positivity") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (auto [a2, b2] : {std::pair{0.0, 1.0}, std::pair{1.0, 1.0}, std::pair{3.0, 5.0}, std::pair{5.0, 0.0}}) {
    const auto p = params(a2, b2);
    const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
    for (QubitMotion motion : {QubitMotion::vibrating, QubitMotion::stationary}) {
      for (double scaled : {0.1, 1.3, 7.7, 42.0}) {
        const double t = scaled / p.sideband_rate();
        const auto map = single_qubit_map(p, wa, wb, t, motion);
        CHECK(map.trace_defect() < 1e-9);
        CHECK(map.min_choi_eigenvalue() >= -1e-8);
        for (int k = 0; k < 10; ++k) {
          cd ce(gauss(rng), gauss(rng)), cg(gauss(rng), gauss(rng));
          const double n = std::sqrt(std::norm(ce) + std::norm(cg));
          const auto q = QubitAmplitudes<double>::make(ce / n, cg / n);
          const auto direct = reduced_qubit_density(motion == QubitMotion::vibrating
                                                        ? evolve_state(q, p, wa, wb, t)
                                                        : stationary_evolve(q, p, wb, t));
          const auto mapped = map.apply(q.density());
          CHECK((direct - mapped).cwiseAbs().maxCoeff() < 1e-9);
          CHECK(hermiticity_error(mapped) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: norm conservation and the rho_gg = 1 - rho_ee identity") {
  for (double a2 : {0.0, 1.0, 3.0, 5.0}) {
    for (double b2 : {0.0, 1.0, 3.0, 5.0}) {
      const auto p = params(a2, b2);
      const auto wa = amps(p.alpha_mag), wb = amps(p.beta_mag);
      for (double scaled : {0.0, 0.9, 4.4, 13.0, 50.0}) {
        const double t = scaled / p.sideband_rate();
        for (const QubitAmplitudes<double>& q :
             {QubitAmplitudes<double>{1, 0}, QubitAmplitudes<double>{kInvSqrt2, kInvSqrt2}}) {
          const auto s = evolve_state(q, p, wa, wb, t);
          CHECK(std::abs(s.norm_squared() - 1.0) < 1e-9);
          const auto rho = reduced_qubit_density(s);
          CHECK(std::abs(rho(1, 1).real() - (1.0 - rho(0, 0).real())) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("ModeParams validation") {
  ModeParams<double> p;
  CHECK(p.validate().empty());
  p.eta = 0.2;
  CHECK(p.validate().size() == 1);
  p.eta = 0.31;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.eta = 0.02;
  p.omega0 = 10;
  p.omega = 7;
  p.omega_v = 3;
  CHECK_NOTHROW(p.validate());
  p.omega_v = 2.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.omega_v = 0;  // not supplied
  CHECK_NOTHROW(p.validate());
  p.kappa = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("QubitAmplitudes::make enforces normalization") {
  CHECK_NOTHROW(QubitAmplitudes<double>::make(cd(0.6), cd(0, 0.8)));
  CHECK_THROWS_AS(QubitAmplitudes<double>::make(cd(0.6), cd(0.6)), ParameterError);
}

TEST_CASE("coarse truncation loses exactly the discarded tail, at any time") {
  // Population promoted out of the last kept level must stay on the grid.
  const auto p = params(1, 1);
  const auto wa = coherent_amplitudes(1.0, 6), wb = coherent_amplitudes(1.0, 6);
  const double kept = (1 - wa.tail_mass) * (1 - wb.tail_mass);
  for (double scaled : {0.0, 1.3, 17.0, 90.0}) {
    const double t = scaled / p.sideband_rate();
    CHECK(evolve_state(QubitAmplitudes<double>{1, 0}, p, wa, wb, t).norm_squared() == doctest::Approx(kept).epsilon(1e-13));
    CHECK(single_qubit_map(p, wa, wb, t).trace_defect() == doctest::Approx(1 - kept).epsilon(1e-9));
    const auto st = stationary_evolve(QubitAmplitudes<double>{1, 0}, p, wb, t);
    CHECK(st.norm_squared() == doctest::Approx(1 - wb.tail_mass).epsilon(1e-13));
  }
}

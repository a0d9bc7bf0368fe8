#include <cmath>

#include "doctest.h"
#include "vibq/oracle.hpp"

using namespace vibq;
using namespace vibq::oracle;
using cd = std::complex<double>;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ModeParams<double> params(double alpha_sq, double beta_sq) {
  ModeParams<double> p;
  p.alpha_mag = std::sqrt(alpha_sq);
  p.beta_mag = std::sqrt(beta_sq);
  return p;
}

ComplexVector<double> basis(const TruncatedOperator<double>& h, int q, int m, int n) {
  ComplexVector<double> v = ComplexVector<double>::Zero(h.dimension());
  v[h.index(q, m, n)] = 1;
  return v;
}

}  // namespace

TEST_CASE("red-sideband matrix elements") {
  const auto p = params(1, 1);
  const double rate = p.sideband_rate();
  const auto h = build_red_sideband(p, 6, 5);
  CHECK(h.dimension() == 2 * 7 * 6);
  CHECK(h.matrix.coeff(h.index(kExcited, 0, 0), h.index(kGround, 1, 1)) == cd(rate));
  for (int m = 0; m < 6; ++m) {
    for (int n = 0; n < 5; ++n) {
      const cd element = h.matrix.coeff(h.index(kExcited, m, n), h.index(kGround, m + 1, n + 1));
      CHECK(std::abs(element - cd(rate * std::sqrt((m + 1.0) * (n + 1.0)))) < 1e-15);
    }
  }
  const Eigen::MatrixXcd dense(h.matrix);
  CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  // Only the sideband pairs are coupled: two entries per pair.
  CHECK(h.matrix.nonZeros() == 2 * 6 * 5);
  CHECK_THROWS_AS(build_red_sideband(p, 3, 8), ParameterError);
}

TEST_CASE("evolve_exact: identity at t = 0 and the isolated Rabi pair") {
  const auto p = params(0, 0);
  const auto h = build_red_sideband(p, 6, 6);
  const auto e00 = basis(h, kExcited, 0, 0);
  for (Propagator kind : {Propagator::block_diagonal, Propagator::taylor}) {
    CHECK((evolve_exact(e00, h, 0.0, kind) - e00).norm() < 1e-15);
    const double theta = 1.3;
    const auto out = evolve_exact(e00, h, theta / p.sideband_rate(), kind);
    CHECK(std::abs(out[h.index(kExcited, 0, 0)] - cd(std::cos(theta))) < 1e-12);
    CHECK(std::abs(out[h.index(kGround, 1, 1)] - cd(0, -std::sin(theta))) < 1e-12);
  }
  CHECK_THROWS_AS(evolve_exact(ComplexVector<double>(2.0 * e00), h, 1.0), ParameterError);
}

TEST_CASE("block structure: 1x1 dark states and 2x2 sideband pairs") {
  const auto h = build_red_sideband(params(1, 1), 7, 9);
  const BlockPropagator<double> prop(h);
  CHECK(prop.largest_block() == 2);
  // 7 x 9 pairs; every other basis state is its own block.
  CHECK(prop.block_count() == std::size_t(h.dimension() - 7 * 9));
}

TEST_CASE("both propagators agree and conserve norm and energy") {
  const auto p = params(3, 1);
  const auto h = build_red_sideband(p, 16, 12);
  const auto psi0 = product_state(h, QubitAmplitudes<double>{kInvSqrt2, cd(0, kInvSqrt2)}, p.alpha_mag, p.beta_mag);
  const double energy0 = expectation(h, psi0);
  for (double scaled : {0.5, 7.0, 100.0}) {
    const double t = scaled / p.sideband_rate();
    const auto block = evolve_exact(psi0, h, t, Propagator::block_diagonal);
    const auto taylor = evolve_exact(psi0, h, t, Propagator::taylor);
    CHECK((block - taylor).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(block.norm() - 1.0) < 1e-10);
    CHECK(std::abs(taylor.norm() - 1.0) < 1e-10);
    CHECK(std::abs(expectation(h, block) - energy0) < 1e-10);
    CHECK(std::abs(expectation(h, taylor) - energy0) < 1e-10);
  }
}

TEST_CASE("coherent product input stays normalized") {
  const auto p = params(5, 5);
  const auto h = build_red_sideband(p, 28, 28);
  const auto psi0 = product_state(h, QubitAmplitudes<double>{1, 0}, p.alpha_mag, p.beta_mag);
  CHECK(std::abs(psi0.norm() - 1.0) < 1e-14);
  for (double scaled : {1.0, 33.0, 100.0}) {
    CHECK(std::abs(evolve_exact(psi0, h, scaled / p.sideband_rate()).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("fidelity") {
  ComplexVector<double> x(3);
  x << cd(1, 2), cd(0, -1), cd(0.5, 0);
  CHECK(fidelity(x, x) == doctest::Approx(1.0));
  CHECK(fidelity(ComplexVector<double>(x * std::polar(1.0, 0.77)), x) == doctest::Approx(1.0));
  ComplexVector<double> e0 = ComplexVector<double>::Zero(3), e1 = ComplexVector<double>::Zero(3);
  e0[0] = 1;
  e1[1] = 1;
  CHECK(fidelity(e0, e1) == 0.0);
  CHECK_THROWS_AS(fidelity(e0, ComplexVector<double>(ComplexVector<double>::Zero(4))), ParameterError);
}

TEST_CASE("two-subsystem oracle at t = 0 is the Bell state") {
  for (BellKind kind : {BellKind::phi, BellKind::psi}) {
    const BellSpec<double> spec{kind, kInvSqrt2, kInvSqrt2};
    const auto rho = two_subsystem_oracle(spec, params(1, 1), 8, 0.0);
    CHECK((rho.rho - bell_state(spec).rho).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("two-subsystem oracle reports its memory requirement") {
  const BellSpec<double> spec{};
  try {
    two_subsystem_oracle(spec, params(1, 1), 10, 1.0, Propagator::block_diagonal, 1024);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(e.required_bytes() == std::size_t(4) * 12 * 12 * 12 * 12 * sizeof(cd));
  }
}

TEST_CASE("oracle moments and partial trace on a product state") {
  const auto p = params(2, 3);
  const auto h = build_red_sideband(p, 30, 30);
  const auto psi = product_state(h, QubitAmplitudes<double>{0.6, 0.8}, p.alpha_mag, p.beta_mag);
  const auto m = mode_moments(psi, h);
  CHECK(m.n_a_mean == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(m.n_b_mean == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::abs(m.cross_corr) < 1e-10);
  const auto rho = reduce_to_qubit(psi, h);
  CHECK(rho(0, 0).real() == doctest::Approx(0.36));
  CHECK(rho(0, 1).real() == doctest::Approx(0.48));
}

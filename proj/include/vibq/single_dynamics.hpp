#pragma once

// Closed-form evolution of a trapped-ion qubit coupled to one vibrational mode
// (index m, amplitude alpha) and one cavity mode (index n, amplitude beta)
// under the red-sideband interaction
//
//   H / hbar = eta kappa (sigma_+ a b + sigma_- a^dag b^dag),
//
// which only couples the pairs |e,m,n> <-> |g,m+1,n+1>. Each pair rotates at
// frequency eta kappa sqrt((m+1)(n+1)); the states |g,m,n> with mn = 0 are dark.
//
// The stationary-qubit baseline is the resonant Jaynes-Cummings model on the
// cavity mode alone, pairs |e,n> <-> |g,n+1> rotating at g sqrt(n+1).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vibq/errors.hpp"
#include "vibq/fock.hpp"
#include "vibq/types.hpp"

namespace vibq {

template <typename Real>
struct ModeParams {
  Real eta{0.02};
  Real kappa{1};
  Real alpha_mag{1};  // vibrational mode amplitude, index m
  Real beta_mag{1};   // cavity mode amplitude, index n
  // Bookkeeping only; zero means "not supplied".
  Real omega0{0};
  Real omega{0};
  Real omega_v{0};
  std::optional<Real> stationary_coupling;

  Real sideband_rate() const { return eta * kappa; }
  Real stationary_rate() const { return stationary_coupling.value_or(kappa); }

  /// Throws ParameterError on violated constraints; returns soft warnings.
  std::vector<std::string> validate() const {
    std::vector<std::string> warnings;
    auto finite_nonneg = [](Real x) { return std::isfinite(x) && x >= Real(0); };
    if (!std::isfinite(eta) || eta <= Real(0)) throw ParameterError("eta must be positive");
    if (eta > Real(0.3)) throw ParameterError("eta exceeds the Lamb-Dicke limit 0.3");
    if (eta > Real(0.1)) warnings.emplace_back("eta > 0.1: first-order Lamb-Dicke expansion is marginal");
    if (!std::isfinite(kappa) || kappa <= Real(0)) throw ParameterError("kappa must be positive");
    if (!finite_nonneg(alpha_mag) || !finite_nonneg(beta_mag)) {
      throw ParameterError("coherent amplitudes must be finite and non-negative");
    }
    if (!finite_nonneg(omega0) || !finite_nonneg(omega) || !finite_nonneg(omega_v)) {
      throw ParameterError("frequencies must be finite and non-negative");
    }
    if (omega0 > 0 && omega > 0 && omega_v > 0) {
      const Real detuning = omega0 - omega;
      if (std::abs(detuning - omega_v) > Real(1e-9) * std::max(std::abs(omega_v), std::abs(detuning))) {
        throw ParameterError("cavity is not tuned to the first red sideband (omega0 - omega != omega_v)");
      }
    }
    if (stationary_coupling && (!std::isfinite(*stationary_coupling) || *stationary_coupling <= Real(0))) {
      throw ParameterError("stationary coupling must be positive");
    }
    return warnings;
  }
};

template <typename Real>
struct QubitAmplitudes {
  Complex<Real> c_e{0};
  Complex<Real> c_g{1};

  static QubitAmplitudes make(Complex<Real> c_e, Complex<Real> c_g) {
    const Real norm = std::norm(c_e) + std::norm(c_g);
    if (!std::isfinite(norm) || std::abs(norm - Real(1)) > Real(1e-12)) {
      throw ParameterError("qubit amplitudes must satisfy |c_e|^2 + |c_g|^2 = 1");
    }
    return {c_e, c_g};
  }

  Matrix2c<Real> density() const {
    Matrix2c<Real> rho;
    rho << c_e * std::conj(c_e), c_e * std::conj(c_g), c_g * std::conj(c_e), c_g * std::conj(c_g);
    return rho;
  }
};

/// Pure state of qubit (x) mode a (x) mode b as two coefficient grids:
/// e_branch(m, n) multiplies |m,n>|e>, g_branch(m, n) multiplies |m,n>|g>.
/// The stationary baseline uses a single row (n_max_a = 0).
template <typename Real>
struct GlobalState {
  ComplexMatrix<Real> e_branch;
  ComplexMatrix<Real> g_branch;
  int n_max_a{0};
  int n_max_b{0};
  Real time{0};

  Real norm_squared() const { return e_branch.squaredNorm() + g_branch.squaredNorm(); }
};

/// Linear map on vectorized qubit densities (rho_ee, rho_eg, rho_ge, rho_gg).
/// Column k is the image of the k-th basis operator |e><e|, |e><g|, |g><e|, |g><g|.
template <typename Real>
struct ProcessMatrix {
  Matrix4c<Real> matrix{Matrix4c<Real>::Identity()};
  Real time{0};

  static Vector4c<Real> vectorize(const Matrix2c<Real>& rho) {
    return Vector4c<Real>(rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1));
  }
  static Matrix2c<Real> unvectorize(const Vector4c<Real>& v) {
    Matrix2c<Real> rho;
    rho << v[0], v[1], v[2], v[3];
    return rho;
  }

  Matrix2c<Real> apply(const Matrix2c<Real>& rho) const { return unvectorize(matrix * vectorize(rho)); }

  /// Image of the operator |x><y|.
  Matrix2c<Real> image(int x, int y) const { return unvectorize(matrix.col(2 * x + y)); }

  /// Choi matrix sum_{xy} |x><y| (x) Lambda(|x><y|).
  Matrix4c<Real> choi() const {
    Matrix4c<Real> j;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) j.template block<2, 2>(2 * x, 2 * y) = image(x, y);
    return j;
  }

  Real min_choi_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c<Real>> solver(choi(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  /// Largest deviation of the ee + gg rows from (1, 0, 0, 1).
  Real trace_defect() const {
    Eigen::Matrix<Complex<Real>, 1, 4> expected;
    expected << Real(1), Real(0), Real(0), Real(1);
    return (matrix.row(0) + matrix.row(3) - expected).cwiseAbs().maxCoeff();
  }
};

/// Which form of the g-branch coupling coefficient D to use. The corrected
/// form pairs |g,m,n> with the weights of its partner |e,m-1,n-1>; the
/// uncorrected form reuses w_m w_n and does not conserve the norm. Only the
/// falsification check should ask for uncorrected.
enum class DCoefficient { corrected, uncorrected };

enum class QubitMotion { vibrating, stationary };

template <typename Real>
struct Coefficients {
  Complex<Real> a;  // |e,m,n> from |e,m,n>
  Complex<Real> b;  // |e,m,n> from |g,m+1,n+1>
  Complex<Real> c;  // |g,m,n> from |g,m,n>
  Complex<Real> d;  // |g,m,n> from |e,m-1,n-1>
};

namespace detail {

template <typename Real>
void check_time(Real t) {
  if (!std::isfinite(t) || t < Real(0)) throw ParameterError("time must be finite and non-negative");
}

template <typename Real>
Coefficients<Real> vibrating_coefficients(int m, int n, Real t, Real rate, const CoherentAmplitudes<Real>& wa,
                                          const CoherentAmplitudes<Real>& wb, DCoefficient d_form) {
  const Complex<Real> minus_i(0, -1);
  const Real upper = rate * t * std::sqrt(Real(m + 1) * Real(n + 1));
  const Real lower = rate * t * std::sqrt(Real(m) * Real(n));
  const Real wmn = wa.weight(m) * wb.weight(n);
  Coefficients<Real> k;
  k.a = wmn * std::cos(upper);
  k.b = minus_i * (wa.weight(m + 1) * wb.weight(n + 1) * std::sin(upper));
  k.c = wmn * std::cos(lower);
  const Real d_weight = d_form == DCoefficient::corrected ? wa.weight(m - 1) * wb.weight(n - 1) : wmn;
  k.d = (m == 0 || n == 0) ? Complex<Real>(0) : minus_i * (d_weight * std::sin(lower));
  return k;
}

template <typename Real>
Coefficients<Real> stationary_coefficients(int n, Real t, Real coupling, const CoherentAmplitudes<Real>& wb) {
  const Complex<Real> minus_i(0, -1);
  const Real upper = coupling * t * std::sqrt(Real(n + 1));
  const Real lower = coupling * t * std::sqrt(Real(n));
  Coefficients<Real> k;
  k.a = wb.weight(n) * std::cos(upper);
  k.b = minus_i * (wb.weight(n + 1) * std::sin(upper));
  k.c = wb.weight(n) * std::cos(lower);
  k.d = minus_i * (wb.weight(n - 1) * std::sin(lower));
  return k;
}

template <typename Real>
struct CoefficientGrids {
  ComplexMatrix<Real> a, b, c, d;
};

template <typename Real>
CoefficientGrids<Real> coefficient_grids(const ModeParams<Real>& p, const CoherentAmplitudes<Real>& wa,
                                         const CoherentAmplitudes<Real>& wb, Real t, QubitMotion motion,
                                         DCoefficient d_form) {
  check_time(t);
  // One level past the amplitude cutoff: D feeds (m + 1, n + 1) from the last
  // populated row and column, and weights beyond n_max read as zero.
  const int rows = motion == QubitMotion::vibrating ? wa.n_max + 2 : 1;
  const int cols = wb.n_max + 2;
  CoefficientGrids<Real> g{ComplexMatrix<Real>(rows, cols), ComplexMatrix<Real>(rows, cols),
                           ComplexMatrix<Real>(rows, cols), ComplexMatrix<Real>(rows, cols)};
  for (int n = 0; n < cols; ++n) {
    for (int m = 0; m < rows; ++m) {
      const Coefficients<Real> k =
          motion == QubitMotion::vibrating
              ? vibrating_coefficients(m, n, t, p.sideband_rate(), wa, wb, d_form)
              : stationary_coefficients(n, t, p.stationary_rate(), wb);
      g.a(m, n) = k.a;
      g.b(m, n) = k.b;
      g.c(m, n) = k.c;
      g.d(m, n) = k.d;
    }
  }
  return g;
}

// sum_{mn} x(m,n) conj(y(m,n))
template <typename Real>
Complex<Real> overlap_sum(const ComplexMatrix<Real>& x, const ComplexMatrix<Real>& y) {
  return (x.array() * y.array().conjugate()).sum();
}

template <typename Real>
GlobalState<Real> assemble(const QubitAmplitudes<Real>& q0, const CoefficientGrids<Real>& g, int n_max_a,
                           int n_max_b, Real t) {
  GlobalState<Real> s;
  s.e_branch = q0.c_e * g.a + q0.c_g * g.b;
  s.g_branch = q0.c_g * g.c + q0.c_e * g.d;
  s.n_max_a = n_max_a;
  s.n_max_b = n_max_b;
  s.time = t;
  return s;
}

}  // namespace detail

/// The four evolution coefficients (A, B, C, D) for grid point (m, n).
template <typename Real>
Coefficients<Real> coefficients(int m, int n, Real t, const ModeParams<Real>& p, const CoherentAmplitudes<Real>& wa,
                                const CoherentAmplitudes<Real>& wb, DCoefficient d_form = DCoefficient::corrected) {
  if (m < 0 || n < 0 || m > wa.n_max || n > wb.n_max) throw ParameterError("coefficients: index out of range");
  detail::check_time(t);
  return detail::vibrating_coefficients(m, n, t, p.sideband_rate(), wa, wb, d_form);
}

template <typename Real>
GlobalState<Real> evolve_state(const QubitAmplitudes<Real>& q0, const ModeParams<Real>& p,
                               const CoherentAmplitudes<Real>& wa, const CoherentAmplitudes<Real>& wb, Real t,
                               DCoefficient d_form = DCoefficient::corrected) {
  const auto grids = detail::coefficient_grids(p, wa, wb, t, QubitMotion::vibrating, d_form);
  return detail::assemble(q0, grids, wa.n_max, wb.n_max, t);
}

/// Resonant Jaynes-Cummings evolution of a motionless qubit with the cavity
/// mode wb; the vibrational grid collapses to a single row.
template <typename Real>
GlobalState<Real> stationary_evolve(const QubitAmplitudes<Real>& q0, const ModeParams<Real>& p,
                                    const CoherentAmplitudes<Real>& wb, Real t) {
  const CoherentAmplitudes<Real> none = coherent_amplitudes(Real(0), 0);
  const auto grids = detail::coefficient_grids(p, none, wb, t, QubitMotion::stationary, DCoefficient::corrected);
  return detail::assemble(q0, grids, 0, wb.n_max, t);
}

/// Partial trace over both modes. rho_gg is computed from the g branch, not
/// imposed as 1 - rho_ee.
template <typename Real>
Matrix2c<Real> reduced_qubit_density(const GlobalState<Real>& s) {
  Matrix2c<Real> rho;
  rho(0, 0) = s.e_branch.squaredNorm();
  rho(1, 1) = s.g_branch.squaredNorm();
  rho(0, 1) = detail::overlap_sum(s.e_branch, s.g_branch);
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

/// Dynamical map of the qubit alone, obtained by evolving each operator basis
/// element with the mode states fixed and tracing the modes out.
template <typename Real>
ProcessMatrix<Real> single_qubit_map(const ModeParams<Real>& p, const CoherentAmplitudes<Real>& wa,
                                     const CoherentAmplitudes<Real>& wb, Real t,
                                     QubitMotion motion = QubitMotion::vibrating) {
  const auto g = detail::coefficient_grids(p, wa, wb, t, motion, DCoefficient::corrected);
  using detail::overlap_sum;
  ProcessMatrix<Real> map;
  map.time = t;
  Matrix4c<Real>& M = map.matrix;
  // rows: ee, eg, ge, gg of the output; columns: |e><e|, |e><g|, |g><e|, |g><g|
  M.col(0) << overlap_sum(g.a, g.a), overlap_sum(g.a, g.d), overlap_sum(g.d, g.a), overlap_sum(g.d, g.d);
  M.col(1) << overlap_sum(g.a, g.b), overlap_sum(g.a, g.c), overlap_sum(g.d, g.b), overlap_sum(g.d, g.c);
  M.col(2) << overlap_sum(g.b, g.a), overlap_sum(g.b, g.d), overlap_sum(g.c, g.a), overlap_sum(g.c, g.d);
  M.col(3) << overlap_sum(g.b, g.b), overlap_sum(g.b, g.c), overlap_sum(g.c, g.b), overlap_sum(g.c, g.c);
  return map;
}

}  // namespace vibq

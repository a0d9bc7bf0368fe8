#pragma once

// Two noninteracting vibrating qubits, each in its own cavity. Each subsystem
// acts on its qubit through its own single-qubit dynamical map, so the joint
// qubit density evolves under the tensor product of the two maps.

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "vibq/errors.hpp"
#include "vibq/observables.hpp"
#include "vibq/single_dynamics.hpp"
#include "vibq/types.hpp"

namespace vibq {

/// 4x4 density in the basis {|e1 e2>, |e1 g2>, |g1 e2>, |g1 g2>}.
template <typename Real>
struct TwoQubitDensity {
  Matrix4c<Real> rho{Matrix4c<Real>::Zero()};
  Real time{0};
};

enum class BellKind {
  phi,  // mu |e g> + upsilon |g e>
  psi,  // mu |e e> + upsilon |g g>
};

template <typename Real>
struct BellSpec {
  BellKind kind{BellKind::phi};
  Complex<Real> mu{Real(1) / std::sqrt(Real(2))};
  Complex<Real> upsilon{Real(1) / std::sqrt(Real(2))};

  /// Pure state vector in the two-qubit standard basis.
  Vector4c<Real> state_vector() const {
    if (std::abs(std::norm(mu) + std::norm(upsilon) - Real(1)) > Real(1e-12)) {
      throw ParameterError("Bell-like state requires |mu|^2 + |upsilon|^2 = 1");
    }
    Vector4c<Real> v = Vector4c<Real>::Zero();
    if (kind == BellKind::phi) {
      v[1] = mu;
      v[2] = upsilon;
    } else {
      v[0] = mu;
      v[3] = upsilon;
    }
    return v;
  }
};

template <typename Real>
TwoQubitDensity<Real> bell_state(const BellSpec<Real>& spec) {
  const Vector4c<Real> v = spec.state_vector();
  return {v * v.adjoint(), Real(0)};
}

/// rho(t) = (Lambda_1 (x) Lambda_2) rho(0): each basis operator
/// |x1 x2><y1 y2| maps to Lambda_1(|x1><y1|) (x) Lambda_2(|x2><y2|).
template <typename Real>
TwoQubitDensity<Real> evolve_two_qubit(const TwoQubitDensity<Real>& rho0, const ProcessMatrix<Real>& m1,
                                       const ProcessMatrix<Real>& m2) {
  const Real scale = std::max({Real(1), std::abs(m1.time), std::abs(m2.time)});
  if (std::abs(m1.time - m2.time) > Real(1e-12) * scale) {
    throw ParameterError("evolve_two_qubit: process matrices are taken at different times");
  }
  TwoQubitDensity<Real> out;
  out.time = m1.time;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Complex<Real> r = rho0.rho(i, j);
      if (r == Complex<Real>(0)) continue;
      const int x1 = i / 2, x2 = i % 2, y1 = j / 2, y2 = j % 2;
      const Matrix4c<Real> term = Eigen::kroneckerProduct(m1.image(x1, y1), m2.image(x2, y2));
      out.rho += r * term;
    }
  }
  return out;
}

namespace detail {

template <typename Real>
void require_density(const Matrix4c<Real>& rho, const char* who, Real trace_tol) {
  const auto d = diagnose_density(rho);
  if (!d.within(Real(1e-9), trace_tol, Real(-1e-8))) {
    throw ParameterError(std::string(who) + ": input is not a valid density matrix");
  }
}

}  // namespace detail

/// Trace slack for a density produced by two local maps built on truncated
/// mode amplitudes: each map loses at most the tail of its two modes.
template <typename Real>
Real truncated_trace_tolerance(const CoherentAmplitudes<Real>& wa, const CoherentAmplitudes<Real>& wb) {
  return Real(1e-9) + Real(2) * (wa.tail_mass + wb.tail_mass);
}

/// Wootters concurrence. The square roots of the eigenvalues of
/// rho (sy (x) sy) rho* (sy (x) sy) are the singular values of
/// sqrt(rho) (sy (x) sy) sqrt(rho)*, which is the better-conditioned route.
template <typename Real>
Real concurrence(const TwoQubitDensity<Real>& state, Real trace_tol = Real(1e-9)) {
  const Matrix4c<Real>& rho = state.rho;
  detail::require_density(rho, "concurrence", trace_tol);

  // sigma_y (x) sigma_y in the standard basis is the real anti-diagonal (-1, 1, 1, -1).
  Matrix4c<Real> yy = Matrix4c<Real>::Zero();
  yy(0, 3) = Real(-1);
  yy(1, 2) = Real(1);
  yy(2, 1) = Real(1);
  yy(3, 0) = Real(-1);

  const Matrix4c<Real> hermitian = (rho + rho.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix4c<Real>> eig(hermitian);
  const Eigen::Matrix<Real, 4, 1> root_eigs = eig.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
  const Matrix4c<Real> sqrt_rho = eig.eigenvectors() * root_eigs.asDiagonal() * eig.eigenvectors().adjoint();

  const Matrix4c<Real> a = sqrt_rho * yy * sqrt_rho.conjugate();
  Eigen::JacobiSVD<Matrix4c<Real>> svd(a);
  const auto& sv = svd.singularValues();  // descending
  const Real c = sv[0] - sv[1] - sv[2] - sv[3];
  return std::clamp(c, Real(0), Real(1));
}

/// l1 coherence of the 4x4 two-qubit density.
template <typename Real>
Real two_qubit_coherence(const TwoQubitDensity<Real>& state) {
  return l1_coherence(state.rho);
}

}  // namespace vibq

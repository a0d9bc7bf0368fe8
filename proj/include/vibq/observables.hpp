#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

#include "vibq/errors.hpp"
#include "vibq/single_dynamics.hpp"
#include "vibq/types.hpp"

namespace vibq {

/// Largest |rho_ij - conj(rho_ji)|.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real hermiticity_error(const Eigen::MatrixBase<Derived>& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

/// l1-norm coherence: the sum of moduli of all off-diagonal elements.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real l1_coherence(const Eigen::MatrixBase<Derived>& rho) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (rho.rows() != rho.cols()) throw ParameterError("l1_coherence: matrix is not square");
  if (hermiticity_error(rho) > Real(1e-9)) throw ParameterError("l1_coherence: matrix is not Hermitian");
  return rho.cwiseAbs().sum() - rho.diagonal().cwiseAbs().sum();
}

/// Deviations of a candidate density matrix from the physical set.
template <typename Real>
struct DensityDiagnostics {
  Real hermiticity_error{0};
  Real trace_error{0};
  Real min_eigenvalue{0};

  bool within(Real hermiticity_tol, Real trace_tol, Real eigen_floor) const {
    return hermiticity_error <= hermiticity_tol && trace_error <= trace_tol && min_eigenvalue >= eigen_floor;
  }
};

template <typename Derived>
auto diagnose_density(const Eigen::MatrixBase<Derived>& rho) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using Plain = typename Derived::PlainObject;
  DensityDiagnostics<Real> d;
  d.hermiticity_error = hermiticity_error(rho);
  d.trace_error = std::abs(rho.trace() - typename Derived::Scalar(1));
  const Plain symmetric = (rho + rho.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Plain> solver(symmetric, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

/// Mode occupations and their correlation at one instant.
template <typename Real>
struct CorrelationSample {
  Real time{0};
  Real n_a_mean{0};    // <a^dag a>, vibrational
  Real n_b_mean{0};    // <b^dag b>, cavity
  Real joint_mean{0};  // <a^dag b^dag b a> = <n_a n_b>
  Real cross_corr{0};  // joint_mean - n_a_mean n_b_mean
  std::optional<Real> g2;
};

/// Moments of the mode number operators on the pure global state, summed
/// directly over the coefficient grids. Expectations are taken with respect to
/// the normalized state so that truncation loss does not masquerade as
/// correlation.
template <typename Real>
CorrelationSample<Real> mode_moments(const GlobalState<Real>& s) {
  Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic> prob =
      s.e_branch.cwiseAbs2().array() + s.g_branch.cwiseAbs2().array();
  const Real total = prob.sum();
  if (!(total > Real(0))) throw ParameterError("mode_moments: state has zero norm");
  prob /= total;
  const auto rows = prob.rows();
  const auto cols = prob.cols();
  const Eigen::Array<Real, Eigen::Dynamic, 1> m = Eigen::Array<Real, Eigen::Dynamic, 1>::LinSpaced(rows, Real(0), Real(rows - 1));
  const Eigen::Array<Real, 1, Eigen::Dynamic> n = Eigen::Array<Real, 1, Eigen::Dynamic>::LinSpaced(cols, Real(0), Real(cols - 1));

  CorrelationSample<Real> out;
  out.time = s.time;
  out.n_a_mean = (prob.colwise() * m).sum();
  out.n_b_mean = (prob.rowwise() * n).sum();
  out.joint_mean = ((prob.colwise() * m).rowwise() * n).sum();
  const Real denom = out.n_a_mean * out.n_b_mean;
  out.cross_corr = out.joint_mean - denom;
  if (denom > Real(1e-15)) out.g2 = out.joint_mean / denom;
  return out;
}

}  // namespace vibq

#pragma once

// Coherent-state number distributions on a truncated Fock grid.

#include <algorithm>
#include <limits>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "vibq/errors.hpp"

namespace vibq {

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Number-state amplitudes w_k of a real coherent state |magnitude>, k = 0..n_max.
///
/// The weights are never renormalized: whatever probability lies beyond n_max
/// is reported in tail_mass so that downstream norm checks see it.
template <typename Real>
struct CoherentAmplitudes {
  Real magnitude{0};
  RealVector<Real> weights;
  int n_max{0};
  Real tail_mass{0};

  /// w_k, with indices outside [0, n_max] reading as zero.
  Real weight(int k) const { return (k < 0 || k > n_max) ? Real(0) : weights[k]; }

  Real mean_excitation() const { return magnitude * magnitude; }
};

namespace detail {

// Poisson probabilities p_k = e^{-mean} mean^k / k! computed in log space, for
// k = 0.. until the terms beyond the mode are negligible against double range.
template <typename Real>
std::vector<Real> poisson_terms(Real mean, int min_count) {
  std::vector<Real> p;
  if (mean == Real(0)) {
    p.assign(static_cast<std::size_t>(std::max(min_count, 1)), Real(0));
    p[0] = Real(1);
    return p;
  }
  const Real log_mean = std::log(mean);
  for (int k = 0;; ++k) {
    const Real log_p = -mean + Real(k) * log_mean - std::lgamma(Real(k) + Real(1));
    p.push_back(std::exp(log_p));
    if (k >= min_count && Real(k) > mean && log_p < Real(-745)) break;
  }
  return p;
}

}  // namespace detail

/// Smallest n_max (never below 4) whose Poisson tail mass sum_{k > n_max} p_k
/// falls below tail_tol. The tail is summed directly, not taken as 1 - CDF.
template <typename Real>
int choose_truncation(Real mean_excitation, Real tail_tol) {
  if (!std::isfinite(mean_excitation) || mean_excitation < Real(0)) {
    throw ParameterError("choose_truncation: mean excitation must be finite and non-negative");
  }
  if (!(tail_tol > Real(0)) || !(tail_tol < Real(1))) {
    throw ParameterError("choose_truncation: tail tolerance must lie in (0, 1)");
  }
  constexpr int kFloor = 4;
  const std::vector<Real> p = detail::poisson_terms(mean_excitation, kFloor + 2);
  // suffix[k] = sum_{j >= k} p_j, accumulated from the small end.
  std::vector<Real> suffix(p.size() + 1, Real(0));
  for (std::size_t k = p.size(); k-- > 0;) suffix[k] = suffix[k + 1] + p[k];
  for (std::size_t n = kFloor; n + 1 < suffix.size(); ++n) {
    if (suffix[n + 1] < tail_tol) return static_cast<int>(n);
  }
  return static_cast<int>(p.size());
}

/// w_k = e^{-|a|^2/2} |a|^k / sqrt(k!) via w_{k+1} = w_k |a| / sqrt(k+1).
template <typename Real>
CoherentAmplitudes<Real> coherent_amplitudes(Real magnitude, int n_max) {
  if (!std::isfinite(magnitude) || magnitude < Real(0)) {
    throw ParameterError("coherent_amplitudes: magnitude must be finite and non-negative");
  }
  if (n_max < 0) throw ParameterError("coherent_amplitudes: n_max must be non-negative");

  CoherentAmplitudes<Real> out;
  out.magnitude = magnitude;
  out.n_max = n_max;
  out.weights.resize(n_max + 1);
  Real w = std::exp(-magnitude * magnitude / Real(2));
  for (int k = 0; k <= n_max; ++k) {
    out.weights[k] = w;
    w *= magnitude / std::sqrt(Real(k + 1));
  }

  // Tail beyond n_max, continued from the same recurrence in probability form.
  Real tail = 0;
  Real p = w * w;
  for (int k = n_max + 1; p > Real(0); ++k) {
    tail += p;
    if (Real(k) > magnitude * magnitude && p < tail * std::numeric_limits<Real>::epsilon()) break;
    p *= magnitude * magnitude / Real(k + 1);
  }
  out.tail_mass = tail;
  return out;
}

/// Coherent amplitudes truncated where the Poisson tail drops below tail_tol.
template <typename Real>
CoherentAmplitudes<Real> coherent_amplitudes_for_tolerance(Real magnitude, Real tail_tol) {
  return coherent_amplitudes(magnitude, choose_truncation(magnitude * magnitude, tail_tol));
}

}  // namespace vibq

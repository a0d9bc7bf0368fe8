#pragma once

// Brute-force reference dynamics. Everything here works on explicit state
// vectors of the truncated qubit (x) mode (x) mode space and never touches
// the closed-form coefficients, so agreement with the analytic modules is an
// independent check of them.
//
// Basis ordering: qubit index slowest (e = 0, g = 1), then mode a, then mode b.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "vibq/composite.hpp"
#include "vibq/errors.hpp"
#include "vibq/fock.hpp"
#include "vibq/observables.hpp"
#include "vibq/single_dynamics.hpp"
#include "vibq/types.hpp"

namespace vibq::oracle {

template <typename Real>
using SparseComplex = Eigen::SparseMatrix<Complex<Real>, Eigen::ColMajor>;

template <typename Real>
struct TruncatedOperator {
  SparseComplex<Real> matrix;
  int levels_a{0};
  int levels_b{0};

  int dimension() const { return 2 * levels_a * levels_b; }
  int index(int qubit, int m, int n) const { return (qubit * levels_a + m) * levels_b + n; }
};

/// H / hbar = eta kappa (sigma_+ a b + sigma_- a^dag b^dag) on Fock levels 0..n_max of each mode.
template <typename Real>
TruncatedOperator<Real> build_red_sideband(const ModeParams<Real>& p, int n_max_a, int n_max_b) {
  if (n_max_a < 4 || n_max_b < 4) throw ParameterError("build_red_sideband: n_max must be at least 4");
  TruncatedOperator<Real> h;
  h.levels_a = n_max_a + 1;
  h.levels_b = n_max_b + 1;
  const Real rate = p.sideband_rate();
  std::vector<Eigen::Triplet<Complex<Real>>> entries;
  for (int m = 0; m + 1 < h.levels_a; ++m) {
    for (int n = 0; n + 1 < h.levels_b; ++n) {
      // sigma_+ a b : |g, m+1, n+1> -> sqrt(m+1) sqrt(n+1) |e, m, n>
      const Real element = rate * std::sqrt(Real(m + 1)) * std::sqrt(Real(n + 1));
      const int e = h.index(kExcited, m, n);
      const int g = h.index(kGround, m + 1, n + 1);
      entries.emplace_back(e, g, element);
      entries.emplace_back(g, e, element);
    }
  }
  h.matrix.resize(h.dimension(), h.dimension());
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  return h;
}

/// Resonant Jaynes-Cummings H / hbar = g (sigma_+ b + sigma_- b^dag), with the
/// vibrational mode frozen to one level. Used for the stationary baseline.
template <typename Real>
TruncatedOperator<Real> build_jaynes_cummings(Real coupling, int n_max_b) {
  if (n_max_b < 4) throw ParameterError("build_jaynes_cummings: n_max must be at least 4");
  TruncatedOperator<Real> h;
  h.levels_a = 1;
  h.levels_b = n_max_b + 1;
  std::vector<Eigen::Triplet<Complex<Real>>> entries;
  for (int n = 0; n + 1 < h.levels_b; ++n) {
    const Real element = coupling * std::sqrt(Real(n + 1));
    const int e = h.index(kExcited, 0, n);
    const int g = h.index(kGround, 0, n + 1);
    entries.emplace_back(e, g, element);
    entries.emplace_back(g, e, element);
  }
  h.matrix.resize(h.dimension(), h.dimension());
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  return h;
}

/// (c_e|e> + c_g|g>) (x) |alpha> (x) |beta> on the operator's grid, normalized.
template <typename Real>
ComplexVector<Real> product_state(const TruncatedOperator<Real>& h, const QubitAmplitudes<Real>& q0, Real alpha_mag,
                                  Real beta_mag) {
  const auto wa = coherent_amplitudes(alpha_mag, h.levels_a - 1);
  const auto wb = coherent_amplitudes(beta_mag, h.levels_b - 1);
  ComplexVector<Real> psi(h.dimension());
  for (int m = 0; m < h.levels_a; ++m) {
    for (int n = 0; n < h.levels_b; ++n) {
      const Real w = wa.weight(m) * wb.weight(n);
      psi[h.index(kExcited, m, n)] = q0.c_e * w;
      psi[h.index(kGround, m, n)] = q0.c_g * w;
    }
  }
  return psi / psi.norm();
}

/// Copy an analytic GlobalState into the oracle basis. Grid points beyond the
/// operator's levels are an error; missing ones are zero.
template <typename Real>
ComplexVector<Real> embed(const GlobalState<Real>& s, const TruncatedOperator<Real>& h) {
  if (s.e_branch.rows() > h.levels_a || s.e_branch.cols() > h.levels_b) {
    throw ParameterError("embed: analytic grid exceeds oracle truncation");
  }
  ComplexVector<Real> psi = ComplexVector<Real>::Zero(h.dimension());
  for (int m = 0; m < s.e_branch.rows(); ++m) {
    for (int n = 0; n < s.e_branch.cols(); ++n) {
      psi[h.index(kExcited, m, n)] = s.e_branch(m, n);
      psi[h.index(kGround, m, n)] = s.g_branch(m, n);
    }
  }
  return psi;
}

/// exp(-i H t) through the connected blocks of H, each diagonalized densely.
template <typename Real>
class BlockPropagator {
 public:
  explicit BlockPropagator(const TruncatedOperator<Real>& h) : dimension_(h.dimension()) {
    const int dim = dimension_;
    std::vector<int> parent(dim);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int col = 0; col < h.matrix.outerSize(); ++col) {
      for (typename SparseComplex<Real>::InnerIterator it(h.matrix, col); it; ++it) {
        if (it.value() == Complex<Real>(0)) continue;
        const int a = find(static_cast<int>(it.row())), b = find(col);
        if (a != b) parent[a] = b;
      }
    }
    std::vector<int> block_of(dim, -1);
    for (int i = 0; i < dim; ++i) {
      const int root = find(i);
      if (block_of[root] < 0) {
        block_of[root] = static_cast<int>(blocks_.size());
        blocks_.emplace_back();
      }
      blocks_[block_of[root]].indices.push_back(i);
    }
    for (Block& b : blocks_) {
      const int k = static_cast<int>(b.indices.size());
      ComplexMatrix<Real> sub(k, k);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) sub(r, c) = h.matrix.coeff(b.indices[r], b.indices[c]);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(sub);
      b.energies = solver.eigenvalues();
      b.vectors = solver.eigenvectors();
    }
  }

  ComplexVector<Real> apply(const ComplexVector<Real>& psi, Real t) const {
    if (psi.size() != dimension_) throw ParameterError("BlockPropagator: dimension mismatch");
    ComplexVector<Real> out(dimension_);
    for (const Block& b : blocks_) {
      const int k = static_cast<int>(b.indices.size());
      ComplexVector<Real> sub(k);
      for (int r = 0; r < k; ++r) sub[r] = psi[b.indices[r]];
      ComplexVector<Real> coords = b.vectors.adjoint() * sub;
      for (int r = 0; r < k; ++r) coords[r] *= std::polar(Real(1), -b.energies[r] * t);
      sub = b.vectors * coords;
      for (int r = 0; r < k; ++r) out[b.indices[r]] = sub[r];
    }
    return out;
  }

  std::size_t block_count() const { return blocks_.size(); }
  std::size_t largest_block() const {
    std::size_t n = 0;
    for (const Block& b : blocks_) n = std::max(n, b.indices.size());
    return n;
  }

 private:
  struct Block {
    std::vector<int> indices;
    RealVector<Real> energies;
    ComplexMatrix<Real> vectors;
  };
  int dimension_;
  std::vector<Block> blocks_;
};

/// exp(-i H t) psi by a truncated Taylor series on sub-steps with ||H h||_1 <= 1/2.
template <typename Real>
ComplexVector<Real> taylor_propagate(const ComplexVector<Real>& psi, const TruncatedOperator<Real>& h, Real t) {
  if (psi.size() != h.dimension()) throw ParameterError("taylor_propagate: dimension mismatch");
  Real norm1 = 0;
  for (int col = 0; col < h.matrix.outerSize(); ++col) {
    Real s = 0;
    for (typename SparseComplex<Real>::InnerIterator it(h.matrix, col); it; ++it) s += std::abs(it.value());
    norm1 = std::max(norm1, s);
  }
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) * norm1 / Real(0.5))));
  const Real dt = t / Real(steps);
  const Complex<Real> factor(0, -dt);
  ComplexVector<Real> v = psi;
  ComplexVector<Real> term(psi.size());
  for (long s = 0; s < steps; ++s) {
    term = v;
    ComplexVector<Real> next = v;
    const Real scale = v.norm();
    for (int k = 1; k < 80; ++k) {
      term = (factor / Real(k)) * (h.matrix * term);
      next += term;
      if (term.norm() <= std::numeric_limits<Real>::epsilon() * Real(1e-2) * scale) break;
    }
    v = next;
  }
  return v;
}

enum class Propagator { block_diagonal, taylor };

/// exp(-i H t) state0.
template <typename Real>
ComplexVector<Real> evolve_exact(const ComplexVector<Real>& state0, const TruncatedOperator<Real>& h, Real t,
                                 Propagator kind = Propagator::block_diagonal) {
  if (std::abs(state0.norm() - Real(1)) > Real(1e-12)) throw ParameterError("evolve_exact: state is not normalized");
  if (!std::isfinite(t)) throw ParameterError("evolve_exact: time must be finite");
  if (kind == Propagator::taylor) return taylor_propagate(state0, h, t);
  return BlockPropagator<Real>(h).apply(state0, t);
}

template <typename Real>
Real fidelity(const ComplexVector<Real>& u, const ComplexVector<Real>& v) {
  if (u.size() != v.size()) throw ParameterError("fidelity: dimension mismatch");
  const Real nu = u.squaredNorm(), nv = v.squaredNorm();
  if (nu == Real(0) || nv == Real(0)) throw ParameterError("fidelity: zero vector");
  return std::min(Real(1), std::norm(u.dot(v)) / (nu * nv));
}

template <typename Real>
Real expectation(const TruncatedOperator<Real>& h, const ComplexVector<Real>& psi) {
  return psi.dot(h.matrix * psi).real() / psi.squaredNorm();
}

/// Qubit density by explicit partial trace over both modes.
template <typename Real>
Matrix2c<Real> reduce_to_qubit(const ComplexVector<Real>& psi, const TruncatedOperator<Real>& h) {
  const int modes = h.levels_a * h.levels_b;
  // Columns are the e and g branches; rho(i, j) = sum_k branch_i conj(branch_j).
  const Eigen::Map<const Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 2>> branches(psi.data(), modes, 2);
  const Matrix2c<Real> rho = branches.transpose() * branches.conjugate();
  return rho;
}

/// <a^dag a>, <b^dag b> and <a^dag b^dag b a> from explicit ladder operators.
template <typename Real>
CorrelationSample<Real> mode_moments(const ComplexVector<Real>& psi, const TruncatedOperator<Real>& h) {
  const int dim = h.dimension();
  std::vector<Eigen::Triplet<Complex<Real>>> ta, tb;
  for (int q = 0; q < 2; ++q) {
    for (int m = 0; m < h.levels_a; ++m) {
      for (int n = 0; n < h.levels_b; ++n) {
        if (m > 0) ta.emplace_back(h.index(q, m - 1, n), h.index(q, m, n), std::sqrt(Real(m)));
        if (n > 0) tb.emplace_back(h.index(q, m, n - 1), h.index(q, m, n), std::sqrt(Real(n)));
      }
    }
  }
  SparseComplex<Real> a(dim, dim), b(dim, dim);
  a.setFromTriplets(ta.begin(), ta.end());
  b.setFromTriplets(tb.begin(), tb.end());
  const Real norm = psi.squaredNorm();
  const ComplexVector<Real> a_psi = a * psi;
  const ComplexVector<Real> b_psi = b * psi;
  const ComplexVector<Real> ba_psi = b * a_psi;

  CorrelationSample<Real> s;
  s.n_a_mean = a_psi.squaredNorm() / norm;
  s.n_b_mean = b_psi.squaredNorm() / norm;
  s.joint_mean = ba_psi.squaredNorm() / norm;
  s.cross_corr = s.joint_mean - s.n_a_mean * s.n_b_mean;
  if (s.n_a_mean * s.n_b_mean > Real(1e-15)) s.g2 = s.joint_mean / (s.n_a_mean * s.n_b_mean);
  return s;
}

/// Default ceiling for the four-mode state vector.
inline constexpr std::size_t kDefaultMemoryBudget = std::size_t(1) << 30;

/// Two identical subsystems prepared in a Bell-like qubit state with every mode
/// coherent. Each subsystem's branch states are propagated with its own
/// exp(-i H t) (the subsystem Hamiltonians commute), the full four-mode state
/// vector is assembled, and all four modes are traced out explicitly.
/// The oracle grid carries one Fock level beyond n_max.
template <typename Real>
TwoQubitDensity<Real> two_subsystem_oracle(const BellSpec<Real>& spec, const ModeParams<Real>& p, int n_max, Real t,
                                           Propagator kind = Propagator::block_diagonal,
                                           std::size_t memory_budget = kDefaultMemoryBudget) {
  const Vector4c<Real> bell = spec.state_vector();
  const std::size_t levels = static_cast<std::size_t>(n_max) + 2;
  const std::size_t modes = levels * levels;            // per subsystem
  const std::size_t joint_modes = modes * modes;        // both subsystems
  const std::size_t required = 4 * joint_modes * sizeof(Complex<Real>);
  if (required > memory_budget) throw ResourceError("two_subsystem_oracle: four-mode state too large", required);

  const TruncatedOperator<Real> h = build_red_sideband(p, n_max + 1, n_max + 1);
  // branch[x] = U |x, alpha, beta> for the qubit basis state x.
  ComplexVector<Real> branch[2];
  for (int x = 0; x < 2; ++x) {
    const auto q = x == kExcited ? QubitAmplitudes<Real>{1, 0} : QubitAmplitudes<Real>{0, 1};
    branch[x] = evolve_exact(product_state(h, q, p.alpha_mag, p.beta_mag), h, t, kind);
  }

  // Global state Psi[(q1 q2), (k1 k2)] with k the mode index of each subsystem.
  ComplexMatrix<Real> global = ComplexMatrix<Real>::Zero(4, static_cast<Eigen::Index>(joint_modes));
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) {
      const Complex<Real> amp = bell[2 * x1 + x2];
      if (amp == Complex<Real>(0)) continue;
      for (int q1 = 0; q1 < 2; ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
          auto row = global.row(2 * q1 + q2);
          for (std::size_t k1 = 0; k1 < modes; ++k1) {
            const Complex<Real> f1 = amp * branch[x1][q1 * modes + k1];
            if (f1 == Complex<Real>(0)) continue;
            for (std::size_t k2 = 0; k2 < modes; ++k2) {
              row[k1 * modes + k2] += f1 * branch[x2][q2 * modes + k2];
            }
          }
        }
      }
    }
  }
  return {global * global.adjoint(), t};
}

}  // namespace vibq::oracle
